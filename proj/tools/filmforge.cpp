#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "filmforge/config.hpp"
#include "filmforge/errors.hpp"
#include "filmforge/report.hpp"

namespace {

using namespace filmforge;

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ValidationError("not a number in list: '" + item + "'");
        }
        if (pos != item.size()) throw ValidationError("not a number in list: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty value list");
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoull(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("not a seed in list: '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError("at least one seed required");
    return out;
}

std::string spectrum_to_string(const SpectralResponse& response) {
    std::ostringstream out;
    write_spectrum_csv(response, out);
    return out.str();
}

int cmd_evaluate(const std::string& config_path, const std::string& thickness_csv,
                 const std::string& out_dir_override) {
    ProblemConfig cfg = parse_problem_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    LoadedProblem problem = load_problem(cfg);

    StackDesign stack = problem.stack_template;
    if (!thickness_csv.empty()) {
        const std::vector<double> th = parse_double_list(thickness_csv);
        if (th.size() != stack.layers.size())
            throw ValidationError("--thicknesses needs " + std::to_string(stack.layers.size()) +
                                  " values, got " + std::to_string(th.size()));
        for (std::size_t i = 0; i < th.size(); ++i) stack.layers[i].thickness_nm = th[i];
    }

    const SpectralResponse response =
        spectral_response(stack, problem.env.band, problem.env.grid_points);
    const double aim = aim_value(response, problem.env.weights);

    const std::filesystem::path out =
        std::filesystem::path(cfg.out_dir) / (cfg.name + "_spectrum.csv");
    write_text_atomic(out, spectrum_to_string(response));

    std::printf("mean_R=%.6f mean_T=%.6f mean_A=%.6f aim=%.6f\n", response.mean_R,
                response.mean_T, response.mean_A, aim);
    std::printf("spectrum: %s\n", out.string().c_str());
    return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& optimizer_override,
                 std::optional<std::uint64_t> seed_override, std::optional<int> episodes_override,
                 const std::string& out_dir_override) {
    ProblemConfig cfg = parse_problem_config(config_path);
    if (!optimizer_override.empty()) cfg.optimizer = optimizer_override;
    if (seed_override) cfg.seed = *seed_override;
    if (episodes_override) {
        if (*episodes_override < 0) throw ValidationError("--episodes must be >= 0");
        cfg.dqn.episodes = *episodes_override;
        cfg.ga.generations = *episodes_override;
    }
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;

    LoadedProblem problem = load_problem(cfg);
    const RunSummary run = run_optimizer(problem, cfg.optimizer, cfg.seed);

    const std::string base = cfg.name + "_" + run.optimizer + "_seed" + std::to_string(run.seed);
    const std::filesystem::path dir(cfg.out_dir);
    write_text_atomic(dir / (base + "_report.json"), report_json(run, cfg));
    write_text_atomic(dir / (base + "_spectrum.csv"), spectrum_to_string(run.best_spectrum));
    write_text_atomic(dir / (base + "_convergence.csv"), convergence_csv(run));

    std::ostringstream th;
    for (std::size_t i = 0; i < run.best_thicknesses_nm.size(); ++i) {
        if (i) th << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.10g", run.best_thicknesses_nm[i]);
        th << buf;
    }
    std::printf("optimizer=%s seed=%llu best_aim=%.6f mean_R=%.6f mean_T=%.6f mean_A=%.6f\n",
                run.optimizer.c_str(), static_cast<unsigned long long>(run.seed), run.best_aim,
                run.best_spectrum.mean_R, run.best_spectrum.mean_T, run.best_spectrum.mean_A);
    std::printf("best_thicknesses_nm=%s\n", th.str().c_str());
    std::printf("report: %s\n", (dir / (base + "_report.json")).string().c_str());
    return 0;
}

int cmd_compare(const std::string& config_path, const std::string& seeds_csv,
                const std::string& optimizer_a, const std::string& optimizer_b,
                const std::string& out_dir_override) {
    ProblemConfig cfg = parse_problem_config(config_path);
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    for (const std::string& opt : {optimizer_a, optimizer_b})
        if (opt != "dqn" && opt != "ga")
            throw ValidationError("optimizer must be 'dqn' or 'ga', got '" + opt + "'");

    const std::vector<std::uint64_t> seeds = parse_seed_list(seeds_csv);
    LoadedProblem problem = load_problem(cfg);
    const CompareResult result = run_compare(problem, seeds, optimizer_a, optimizer_b);

    const std::filesystem::path out =
        std::filesystem::path(cfg.out_dir) / (cfg.name + "_compare.csv");
    write_text_atomic(out, compare_csv(result));

    std::printf("%s: median best_aim=%.6f median mean_R=%.6f\n", result.optimizer_a.c_str(),
                result.median_a_best_aim, result.median_a_mean_R);
    std::printf("%s: median best_aim=%.6f median mean_R=%.6f\n", result.optimizer_b.c_str(),
                result.median_b_best_aim, result.median_b_mean_R);
    std::printf("table: %s\n", out.string().c_str());
    for (const auto& row : result.rows) {
        if (row.a.failed)
            std::fprintf(stderr, "seed %llu %s failed: %s\n",
                         static_cast<unsigned long long>(row.seed), result.optimizer_a.c_str(),
                         row.a.error.c_str());
        if (row.b.failed)
            std::fprintf(stderr, "seed %llu %s failed: %s\n",
                         static_cast<unsigned long long>(row.seed), result.optimizer_b.c_str(),
                         row.b.error.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"filmforge: multilayer optical coating design via DQN or GA over a "
                 "transfer-matrix simulator"};
    app.require_subcommand(1);

    std::string config_path, thicknesses, out_dir;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate one stack and write its spectrum");
    evaluate->add_option("config", config_path, "problem config (JSON)")->required();
    evaluate->add_option("--thicknesses", thicknesses,
                         "comma-separated thickness override, nm per free layer");
    evaluate->add_option("--out", out_dir, "output directory (default: config out_dir)");

    std::string opt_optimizer;
    std::optional<std::uint64_t> opt_seed;
    std::optional<int> opt_episodes;
    auto* optimize = app.add_subcommand("optimize", "Optimize the problem with DQN or GA");
    optimize->add_option("config", config_path, "problem config (JSON)")->required();
    optimize->add_option("--optimizer", opt_optimizer, "dqn or ga (default: config optimizer)")
        ->check(CLI::IsMember({"dqn", "ga"}));
    optimize->add_option("--seed", opt_seed, "run seed (default: config seed)");
    optimize->add_option("--episodes", opt_episodes,
                         "episode (dqn) or generation (ga) count override");
    optimize->add_option("--out", out_dir, "output directory (default: config out_dir)");

    std::string seeds_csv, optimizer_a = "dqn", optimizer_b = "ga";
    auto* compare = app.add_subcommand(
        "compare", "Run two optimizers per seed under matched evaluation budgets");
    compare->add_option("config", config_path, "problem config (JSON)")->required();
    compare->add_option("--seeds", seeds_csv, "comma-separated seed list")->required();
    compare->add_option("--optimizer-a", optimizer_a, "first optimizer (default dqn)");
    compare->add_option("--optimizer-b", optimizer_b, "second optimizer (default ga)");
    compare->add_option("--out", out_dir, "output directory (default: config out_dir)");

    try {
        app.parse(argc, argv);
        if (evaluate->parsed()) return cmd_evaluate(config_path, thicknesses, out_dir);
        if (optimize->parsed())
            return cmd_optimize(config_path, opt_optimizer, opt_seed, opt_episodes, out_dir);
        return cmd_compare(config_path, seeds_csv, optimizer_a, optimizer_b, out_dir);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
