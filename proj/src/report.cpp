#include "filmforge/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "filmforge/errors.hpp"

namespace filmforge {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

void append_side_cells(std::ostringstream& out, const CompareSide& side) {
    if (side.failed) {
        out << ",error,error,error,error";
        return;
    }
    out << ',' << fmt("%.10g", side.best_aim) << ',' << fmt("%.10g", side.mean_R) << ','
        << fmt("%.10g", side.mean_T) << ',' << side.aim_evaluations;
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunSummary summarize(const AgentRunReport& report, int episodes) {
    RunSummary s;
    s.optimizer = "dqn";
    s.seed = report.seed;
    s.rounds = episodes;
    s.total_steps = report.total_steps;
    s.aim_evaluations = report.aim_evaluations;
    s.best_thicknesses_nm = report.best_thicknesses_nm;
    s.best_aim = report.best_aim;
    s.best_spectrum = report.best_spectrum;
    s.curve = report.curve;
    return s;
}

RunSummary summarize(const GaResult& result, std::uint64_t seed) {
    RunSummary s;
    s.optimizer = "ga";
    s.seed = seed;
    s.rounds = static_cast<int>(result.curve.size());
    s.aim_evaluations = result.evaluations;
    s.best_thicknesses_nm = result.best_thicknesses_nm;
    s.best_aim = result.best_aim;
    s.best_spectrum = result.best_spectrum;
    s.curve = result.curve;
    return s;
}

std::string report_json(const RunSummary& run, const ProblemConfig& config) {
    json root;
    root["name"] = config.name;
    root["optimizer"] = run.optimizer;
    root["seed"] = run.seed;
    root[run.optimizer == "ga" ? "generations" : "episodes"] = run.rounds;
    if (run.optimizer == "dqn") root["total_steps"] = run.total_steps;
    root["aim_evaluations"] = run.aim_evaluations;
    root["best_aim"] = run.best_aim;
    root["best_thicknesses_nm"] = run.best_thicknesses_nm;
    root["mean_R"] = run.best_spectrum.mean_R;
    root["mean_T"] = run.best_spectrum.mean_T;
    root["mean_A"] = run.best_spectrum.mean_A;
    root["config"] = json::parse(echo_problem_config(config));
    return root.dump(2) + "\n";
}

std::string convergence_csv(const RunSummary& run) {
    std::ostringstream out;
    out << "episode,best_aim,mean_A,mean_R\n";
    for (std::size_t i = 0; i < run.curve.size(); ++i) {
        const ConvergencePoint& p = run.curve[i];
        out << (i + 1) << ',' << fmt("%.10g", p.best_aim) << ',' << fmt("%.10g", p.mean_A) << ','
            << fmt("%.10g", p.mean_R) << '\n';
    }
    return out.str();
}

RunSummary run_optimizer(const LoadedProblem& problem, const std::string& optimizer,
                         std::uint64_t seed, std::optional<std::uint64_t> max_evaluations) {
    if (optimizer == "dqn") {
        Environment env(problem.env);
        AgentConfig agent = agent_config_from(problem.config);
        agent.hyper.seed = seed;
        AgentRunReport report = train(env, agent);
        return summarize(report, agent.episodes);
    }
    if (optimizer == "ga") {
        GaConfig ga = ga_config_from(problem.config);
        ga.seed = seed;
        ga.max_evaluations = max_evaluations;
        if (max_evaluations) {
            // Budget matching: let the generation count stretch so the GA can
            // actually consume the whole allowance instead of stopping at the
            // config's default generation cap.
            const std::uint64_t pop = static_cast<std::uint64_t>(ga.population_size);
            const std::uint64_t needed = (*max_evaluations + pop - 1) / pop;
            if (needed > static_cast<std::uint64_t>(ga.generations))
                ga.generations = static_cast<int>(
                    std::min<std::uint64_t>(needed, std::numeric_limits<int>::max()));
        }
        GaResult result = run_ga(problem.stack_template, problem.env.band,
                                 problem.env.grid_points, problem.env.weights, ga);
        return summarize(result, seed);
    }
    throw ValidationError("unknown optimizer: " + optimizer);
}

CompareResult run_compare(const LoadedProblem& problem, const std::vector<std::uint64_t>& seeds,
                          const std::string& optimizer_a, const std::string& optimizer_b) {
    if (seeds.empty()) throw ValidationError("compare: at least one seed required");
    CompareResult result;
    result.optimizer_a = optimizer_a;
    result.optimizer_b = optimizer_b;

    for (std::uint64_t seed : seeds) {
        CompareRow row;
        row.seed = seed;
        std::optional<std::uint64_t> budget;
        try {
            RunSummary a = run_optimizer(problem, optimizer_a, seed);
            row.a = {false, "", a.best_aim, a.best_spectrum.mean_R, a.best_spectrum.mean_T,
                     a.aim_evaluations};
            if (optimizer_a == "dqn") budget = a.aim_evaluations;
        } catch (const std::exception& e) {
            row.a.failed = true;
            row.a.error = e.what();
        }
        try {
            // Budget matching applies to the GA side: it stops before the
            // generation that would exceed the DQN's evaluation count.
            RunSummary b = run_optimizer(problem, optimizer_b, seed,
                                         optimizer_b == "ga" ? budget : std::nullopt);
            row.b = {false, "", b.best_aim, b.best_spectrum.mean_R, b.best_spectrum.mean_T,
                     b.aim_evaluations};
        } catch (const std::exception& e) {
            row.b.failed = true;
            row.b.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }

    std::vector<double> a_aim, a_R, b_aim, b_R;
    for (const auto& row : result.rows) {
        if (!row.a.failed) {
            a_aim.push_back(row.a.best_aim);
            a_R.push_back(row.a.mean_R);
        }
        if (!row.b.failed) {
            b_aim.push_back(row.b.best_aim);
            b_R.push_back(row.b.mean_R);
        }
    }
    if (!a_aim.empty()) {
        result.median_a_best_aim = median(a_aim);
        result.median_a_mean_R = median(a_R);
    }
    if (!b_aim.empty()) {
        result.median_b_best_aim = median(b_aim);
        result.median_b_mean_R = median(b_R);
    }
    return result;
}

std::string compare_csv(const CompareResult& r) {
    std::ostringstream out;
    out << "seed," << r.optimizer_a << "_best_aim," << r.optimizer_a << "_mean_R,"
        << r.optimizer_a << "_mean_T," << r.optimizer_a << "_evaluations," << r.optimizer_b
        << "_best_aim," << r.optimizer_b << "_mean_R," << r.optimizer_b << "_mean_T,"
        << r.optimizer_b << "_evaluations\n";
    for (const auto& row : r.rows) {
        out << row.seed;
        append_side_cells(out, row.a);
        append_side_cells(out, row.b);
        out << '\n';
    }
    out << "median," << fmt("%.10g", r.median_a_best_aim) << ',' << fmt("%.10g", r.median_a_mean_R)
        << ",,," << fmt("%.10g", r.median_b_best_aim) << ',' << fmt("%.10g", r.median_b_mean_R)
        << ",,\n";
    return out.str();
}

double median(std::vector<double> values) {
    if (values.empty()) throw ContractError("median of an empty list");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace filmforge
