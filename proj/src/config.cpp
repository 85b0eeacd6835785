#include "filmforge/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "filmforge/errors.hpp"

#ifndef FILMFORGE_DEFAULT_MATERIALS_DIR
#define FILMFORGE_DEFAULT_MATERIALS_DIR "data/materials"
#endif

namespace filmforge {

namespace {

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    std::string unknown;
    for (const auto& item : obj.items()) {
        if (allowed.count(item.key())) continue;
        if (!unknown.empty()) unknown += ", ";
        unknown += where.empty() ? item.key() : where + "." + item.key();
    }
    if (!unknown.empty()) throw ValidationError("config: unknown key(s): " + unknown);
}

// Collects type errors instead of throwing so a config's problems are
// reported in one pass.
struct Reader {
    const json& obj;
    std::string prefix;
    std::vector<std::string>& errors;

    std::string label(const char* key) const {
        return prefix.empty() ? std::string(key) : prefix + "." + key;
    }

    template <typename T>
    void read(const char* key, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back("key '" + label(key) + "' has the wrong type");
        }
    }

    template <typename T>
    void read_optional(const char* key, std::optional<T>& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back("key '" + label(key) + "' has the wrong type");
        }
    }
};

void check(bool ok, const std::string& message, std::vector<std::string>& errors) {
    if (!ok) errors.push_back(message);
}

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
    return true;
}

ProblemConfig parse_json(const json& root, const std::string& origin) {
    if (!root.is_object()) throw ValidationError(origin + ": top level must be a JSON object");

    reject_unknown_keys(root, "",
                        {"name", "layers", "substrate", "backing", "incident", "band", "weights",
                         "initial_thicknesses_nm", "thickness_bounds", "precision_level",
                         "observation_scale", "no_improve_window", "aim_threshold",
                         "max_steps_per_episode", "optimizer", "seed", "out_dir", "materials_dir",
                         "dqn", "ga"});

    std::string missing;
    for (const char* key : {"name", "layers", "substrate", "band", "weights",
                            "initial_thicknesses_nm"}) {
        if (root.contains(key)) continue;
        if (!missing.empty()) missing += ", ";
        missing += key;
    }
    if (!missing.empty()) throw ValidationError("config: missing required key(s): " + missing);

    ProblemConfig cfg;
    std::vector<std::string> errors;
    Reader top{root, "", errors};
    top.read("name", cfg.name);
    top.read("layers", cfg.layers);
    top.read("substrate", cfg.substrate);
    top.read("incident", cfg.incident);
    top.read("initial_thicknesses_nm", cfg.initial_thicknesses_nm);
    top.read("precision_level", cfg.precision_level);
    top.read("observation_scale", cfg.observation_scale);
    top.read("no_improve_window", cfg.no_improve_window);
    top.read_optional("aim_threshold", cfg.aim_threshold);
    top.read("max_steps_per_episode", cfg.max_steps_per_episode);
    top.read("optimizer", cfg.optimizer);
    top.read("seed", cfg.seed);
    top.read("out_dir", cfg.out_dir);
    top.read_optional("materials_dir", cfg.materials_dir);

    if (root.contains("band")) {
        const json& band = root.at("band");
        if (!band.is_object()) {
            errors.push_back("key 'band' must be an object");
        } else {
            reject_unknown_keys(band, "band", {"lo_nm", "hi_nm", "grid_points"});
            Reader r{band, "band", errors};
            r.read("lo_nm", cfg.band.lo_nm);
            r.read("hi_nm", cfg.band.hi_nm);
            r.read("grid_points", cfg.grid_points);
        }
    }
    if (root.contains("weights")) {
        const json& w = root.at("weights");
        if (!w.is_object()) {
            errors.push_back("key 'weights' must be an object");
        } else {
            reject_unknown_keys(w, "weights", {"w_T", "w_R", "w_A"});
            Reader r{w, "weights", errors};
            r.read("w_T", cfg.weights.w_T);
            r.read("w_R", cfg.weights.w_R);
            r.read("w_A", cfg.weights.w_A);
        }
    }
    if (root.contains("thickness_bounds")) {
        const json& b = root.at("thickness_bounds");
        if (!b.is_object()) {
            errors.push_back("key 'thickness_bounds' must be an object");
        } else {
            reject_unknown_keys(b, "thickness_bounds", {"min_nm", "max_nm"});
            Reader r{b, "thickness_bounds", errors};
            r.read("min_nm", cfg.min_thickness_nm);
            r.read("max_nm", cfg.max_thickness_nm);
        }
    }
    if (root.contains("backing")) {
        const json& b = root.at("backing");
        if (!b.is_object()) {
            errors.push_back("key 'backing' must be an object");
        } else {
            reject_unknown_keys(b, "backing", {"material", "thickness_nm"});
            BackingSpec spec;
            Reader r{b, "backing", errors};
            r.read("material", spec.material);
            r.read("thickness_nm", spec.thickness_nm);
            cfg.backing = spec;
        }
    }
    if (root.contains("dqn")) {
        const json& d = root.at("dqn");
        if (!d.is_object()) {
            errors.push_back("key 'dqn' must be an object");
        } else {
            reject_unknown_keys(d, "dqn",
                                {"gamma", "lr0", "lr_decay", "batch_size", "replay_capacity",
                                 "episodes", "eps_start", "eps_end", "eps_decay_steps",
                                 "use_target_network", "target_sync_period"});
            Reader r{d, "dqn", errors};
            r.read("gamma", cfg.dqn.gamma);
            r.read("lr0", cfg.dqn.lr0);
            r.read("lr_decay", cfg.dqn.lr_decay);
            r.read("batch_size", cfg.dqn.batch_size);
            r.read("replay_capacity", cfg.dqn.replay_capacity);
            r.read("episodes", cfg.dqn.episodes);
            r.read("eps_start", cfg.dqn.eps_start);
            r.read("eps_end", cfg.dqn.eps_end);
            r.read("eps_decay_steps", cfg.dqn.eps_decay_steps);
            r.read("use_target_network", cfg.dqn.use_target_network);
            r.read("target_sync_period", cfg.dqn.target_sync_period);
        }
    }
    if (root.contains("ga")) {
        const json& g = root.at("ga");
        if (!g.is_object()) {
            errors.push_back("key 'ga' must be an object");
        } else {
            reject_unknown_keys(g, "ga",
                                {"population_size", "generations", "crossover_rate",
                                 "mutation_rate", "mutation_sigma_nm", "elitism_count"});
            Reader r{g, "ga", errors};
            r.read("population_size", cfg.ga.population_size);
            r.read("generations", cfg.ga.generations);
            r.read("crossover_rate", cfg.ga.crossover_rate);
            r.read("mutation_rate", cfg.ga.mutation_rate);
            r.read("mutation_sigma_nm", cfg.ga.mutation_sigma_nm);
            r.read("elitism_count", cfg.ga.elitism_count);
        }
    }

    check(valid_name(cfg.name), "name must be non-empty alphanumeric/_/- (used in file names)",
          errors);
    check(!cfg.layers.empty(), "layers must list at least one material", errors);
    for (const auto& m : cfg.layers)
        check(!m.empty(), "layer material names must be non-empty", errors);
    check(!cfg.substrate.empty(), "substrate material name must be non-empty", errors);
    check(cfg.band.lo_nm < cfg.band.hi_nm, "band.lo_nm must be below band.hi_nm", errors);
    check(cfg.grid_points >= 2, "band.grid_points must be >= 2", errors);
    check(std::isfinite(cfg.weights.w_T) && std::isfinite(cfg.weights.w_R) &&
              std::isfinite(cfg.weights.w_A),
          "weights must be finite", errors);
    check(cfg.weights.w_T != 0.0 || cfg.weights.w_R != 0.0 || cfg.weights.w_A != 0.0,
          "weights must not all be zero", errors);
    check(cfg.initial_thicknesses_nm.size() == cfg.layers.size(),
          "initial_thicknesses_nm must have one value per layer", errors);
    check(cfg.min_thickness_nm >= 0.0 && cfg.min_thickness_nm < cfg.max_thickness_nm,
          "thickness_bounds must satisfy 0 <= min_nm < max_nm", errors);
    for (double t : cfg.initial_thicknesses_nm)
        check(t >= cfg.min_thickness_nm && t <= cfg.max_thickness_nm,
              "initial thicknesses must lie within thickness_bounds", errors);
    check(cfg.precision_level >= 1, "precision_level must be >= 1", errors);
    check(cfg.observation_scale > 0.0 && std::isfinite(cfg.observation_scale),
          "observation_scale must be positive and finite", errors);
    check(cfg.no_improve_window >= 1, "no_improve_window must be >= 1", errors);
    check(cfg.max_steps_per_episode >= 1, "max_steps_per_episode must be >= 1", errors);
    check(cfg.optimizer == "dqn" || cfg.optimizer == "ga", "optimizer must be 'dqn' or 'ga'",
          errors);
    if (cfg.backing) {
        check(!cfg.backing->material.empty(), "backing.material must be non-empty", errors);
        check(cfg.backing->thickness_nm >= 0.0 && std::isfinite(cfg.backing->thickness_nm),
              "backing.thickness_nm must be >= 0", errors);
    }
    check(cfg.dqn.gamma >= 0.0 && cfg.dqn.gamma < 1.0, "dqn.gamma must be in [0, 1)", errors);
    check(cfg.dqn.lr0 > 0.0, "dqn.lr0 must be positive", errors);
    check(cfg.dqn.lr_decay > 0.0 && cfg.dqn.lr_decay <= 1.0, "dqn.lr_decay must be in (0, 1]",
          errors);
    check(cfg.dqn.batch_size >= 1, "dqn.batch_size must be >= 1", errors);
    check(cfg.dqn.replay_capacity >= cfg.dqn.batch_size,
          "dqn.replay_capacity must be >= dqn.batch_size", errors);
    check(cfg.dqn.episodes >= 0, "dqn.episodes must be >= 0", errors);
    check(1.0 >= cfg.dqn.eps_start && cfg.dqn.eps_start >= cfg.dqn.eps_end &&
              cfg.dqn.eps_end >= 0.0,
          "dqn epsilon schedule must satisfy 1 >= eps_start >= eps_end >= 0", errors);
    check(cfg.dqn.eps_decay_steps >= 1, "dqn.eps_decay_steps must be >= 1", errors);
    check(cfg.dqn.target_sync_period >= 1, "dqn.target_sync_period must be >= 1", errors);
    check(cfg.ga.population_size >= 2, "ga.population_size must be >= 2", errors);
    check(cfg.ga.generations >= 0, "ga.generations must be >= 0", errors);
    check(cfg.ga.crossover_rate >= 0.0 && cfg.ga.crossover_rate <= 1.0,
          "ga.crossover_rate must be in [0, 1]", errors);
    check(cfg.ga.mutation_rate >= 0.0 && cfg.ga.mutation_rate <= 1.0,
          "ga.mutation_rate must be in [0, 1]", errors);
    check(cfg.ga.mutation_sigma_nm > 0.0, "ga.mutation_sigma_nm must be > 0", errors);
    check(cfg.ga.elitism_count >= 0 && cfg.ga.elitism_count < cfg.ga.population_size,
          "ga.elitism_count must be in [0, population_size)", errors);
    if (cfg.aim_threshold)
        check(std::isfinite(*cfg.aim_threshold), "aim_threshold must be finite", errors);

    if (!errors.empty()) {
        std::string msg = origin + ": invalid config:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ValidationError(msg);
    }
    return cfg;
}

}  // namespace

ProblemConfig parse_problem_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return parse_json(root, origin);
}

ProblemConfig parse_problem_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ValidationError("config file not found or unreadable: " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_problem_config_text(buffer.str(), file.filename().string());
}

std::string echo_problem_config(const ProblemConfig& c) {
    json root;
    root["name"] = c.name;
    root["layers"] = c.layers;
    root["substrate"] = c.substrate;
    if (c.backing)
        root["backing"] = {{"material", c.backing->material},
                           {"thickness_nm", c.backing->thickness_nm}};
    root["incident"] = c.incident;
    root["band"] = {{"lo_nm", c.band.lo_nm}, {"hi_nm", c.band.hi_nm}, {"grid_points", c.grid_points}};
    root["weights"] = {{"w_T", c.weights.w_T}, {"w_R", c.weights.w_R}, {"w_A", c.weights.w_A}};
    root["initial_thicknesses_nm"] = c.initial_thicknesses_nm;
    root["thickness_bounds"] = {{"min_nm", c.min_thickness_nm}, {"max_nm", c.max_thickness_nm}};
    root["precision_level"] = c.precision_level;
    root["observation_scale"] = c.observation_scale;
    root["no_improve_window"] = c.no_improve_window;
    if (c.aim_threshold) root["aim_threshold"] = *c.aim_threshold;
    root["max_steps_per_episode"] = c.max_steps_per_episode;
    root["optimizer"] = c.optimizer;
    root["seed"] = c.seed;
    root["out_dir"] = c.out_dir;
    if (c.materials_dir) root["materials_dir"] = *c.materials_dir;
    root["dqn"] = {{"gamma", c.dqn.gamma},
                   {"lr0", c.dqn.lr0},
                   {"lr_decay", c.dqn.lr_decay},
                   {"batch_size", c.dqn.batch_size},
                   {"replay_capacity", c.dqn.replay_capacity},
                   {"episodes", c.dqn.episodes},
                   {"eps_start", c.dqn.eps_start},
                   {"eps_end", c.dqn.eps_end},
                   {"eps_decay_steps", c.dqn.eps_decay_steps},
                   {"use_target_network", c.dqn.use_target_network},
                   {"target_sync_period", c.dqn.target_sync_period}};
    root["ga"] = {{"population_size", c.ga.population_size},
                  {"generations", c.ga.generations},
                  {"crossover_rate", c.ga.crossover_rate},
                  {"mutation_rate", c.ga.mutation_rate},
                  {"mutation_sigma_nm", c.ga.mutation_sigma_nm},
                  {"elitism_count", c.ga.elitism_count}};
    return root.dump(2);
}

std::filesystem::path resolve_materials_dir(const ProblemConfig& config) {
    if (const char* env = std::getenv("FILMFORGE_MATERIALS_DIR"); env && *env)
        return std::filesystem::path(env);
    if (config.materials_dir) return std::filesystem::path(*config.materials_dir);
    return std::filesystem::path(FILMFORGE_DEFAULT_MATERIALS_DIR);
}

LoadedProblem load_problem(const ProblemConfig& config) {
    const std::filesystem::path dir = resolve_materials_dir(config);

    std::map<std::string, MaterialRef> cache;
    auto resolve = [&](const std::string& name) -> MaterialRef {
        auto it = cache.find(name);
        if (it != cache.end()) return it->second;
        MaterialRef ref;
        if (name == "air") {
            ref = make_constant_material("air", 1.0, 0.0, 1.0, 1e9);
        } else {
            const std::filesystem::path file = dir / (name + ".csv");
            if (!std::filesystem::exists(file))
                throw ValidationError("material file not found: " + file.string() +
                                      " (materials dir: " + dir.string() + ")");
            ref = std::make_shared<const MaterialTable>(
                load_material_table_file(file.string(), name));
        }
        cache.emplace(name, ref);
        return ref;
    };

    LoadedProblem out;
    out.config = config;

    EnvConfig& env = out.env;
    for (const auto& layer : config.layers) env.layer_materials.push_back(resolve(layer));
    env.substrate = resolve(config.substrate);
    if (config.backing) env.backing = Layer{resolve(config.backing->material),
                                            config.backing->thickness_nm};
    if (config.incident != "air") env.incident_medium = resolve(config.incident);
    env.initial_thicknesses_nm = config.initial_thicknesses_nm;
    env.band = config.band;
    env.grid_points = config.grid_points;
    env.weights = config.weights;
    env.precision_level = config.precision_level;
    env.no_improve_window = config.no_improve_window;
    if (config.aim_threshold) env.aim_threshold = *config.aim_threshold;
    env.max_steps_per_episode = config.max_steps_per_episode;
    env.min_thickness_nm = config.min_thickness_nm;
    env.max_thickness_nm = config.max_thickness_nm;
    env.observation_scale = config.observation_scale;

    std::vector<MaterialRef> used = env.layer_materials;
    used.push_back(env.substrate);
    if (env.backing) used.push_back(env.backing->material);
    if (env.incident_medium) used.push_back(env.incident_medium);
    auto gaps = coverage_check(used, env.band.lo_nm, env.band.hi_nm);
    if (!gaps.empty()) {
        std::string msg = "material data does not cover the band:";
        for (const auto& g : gaps) {
            std::ostringstream os;
            os << ' ' << g.material << " misses " << g.missing_lo_nm << '-' << g.missing_hi_nm
               << " nm;";
            msg += os.str();
        }
        throw ValidationError(msg);
    }

    StackDesign& stack = out.stack_template;
    stack.incident_medium = env.incident_medium;
    stack.substrate = env.substrate;
    stack.backing = env.backing;
    for (std::size_t i = 0; i < env.layer_materials.size(); ++i)
        stack.layers.push_back({env.layer_materials[i], env.initial_thicknesses_nm[i]});
    return out;
}

AgentConfig agent_config_from(const ProblemConfig& config) {
    AgentConfig a;
    a.hyper.gamma = config.dqn.gamma;
    a.hyper.lr0 = config.dqn.lr0;
    a.hyper.lr_decay = config.dqn.lr_decay;
    a.hyper.batch_size = config.dqn.batch_size;
    a.hyper.seed = config.seed;
    a.schedule.eps_start = config.dqn.eps_start;
    a.schedule.eps_end = config.dqn.eps_end;
    a.schedule.decay_steps = config.dqn.eps_decay_steps;
    a.replay_capacity = static_cast<std::size_t>(config.dqn.replay_capacity);
    a.episodes = config.dqn.episodes;
    a.use_target_network = config.dqn.use_target_network;
    a.target_sync_period = config.dqn.target_sync_period;
    return a;
}

GaConfig ga_config_from(const ProblemConfig& config) {
    GaConfig g;
    g.population_size = config.ga.population_size;
    g.generations = config.ga.generations;
    g.crossover_rate = config.ga.crossover_rate;
    g.mutation_rate = config.ga.mutation_rate;
    g.mutation_sigma_nm = config.ga.mutation_sigma_nm;
    g.elitism_count = config.ga.elitism_count;
    g.min_thickness_nm = config.min_thickness_nm;
    g.max_thickness_nm = config.max_thickness_nm;
    g.seed = config.seed;
    return g;
}

}  // namespace filmforge
