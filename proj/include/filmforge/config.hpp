#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "filmforge/agent.hpp"
#include "filmforge/environment.hpp"
#include "filmforge/ga.hpp"

namespace filmforge {

struct BackingSpec {
    std::string material;
    double thickness_nm = 0.0;
    bool operator==(const BackingSpec&) const = default;
};

struct DqnSettings {
    double gamma = 0.9;
    double lr0 = 1e-3;
    double lr_decay = 0.995;
    int batch_size = 32;
    int replay_capacity = 10000;
    int episodes = 100;
    double eps_start = 1.0;
    double eps_end = 0.1;
    int eps_decay_steps = 20000;
    bool use_target_network = false;
    int target_sync_period = 500;
    bool operator==(const DqnSettings&) const = default;
};

struct GaSettings {
    int population_size = 50;
    int generations = 200;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;
    double mutation_sigma_nm = 5.0;
    int elitism_count = 2;
    bool operator==(const GaSettings&) const = default;
};

// One design problem as described by a JSON config file. Field defaults
// are what parse_problem_config fills in when a key is absent.
struct ProblemConfig {
    std::string name;
    std::vector<std::string> layers;  // material name per free layer
    std::string substrate;
    std::optional<BackingSpec> backing;
    std::string incident = "air";
    Band band;
    int grid_points = 61;
    AimWeights weights;
    std::vector<double> initial_thicknesses_nm;
    double min_thickness_nm = 0.0;
    double max_thickness_nm = 500.0;
    int precision_level = 1;
    double observation_scale = 128.0;
    int no_improve_window = 50;
    std::optional<double> aim_threshold;  // absent = disabled
    int max_steps_per_episode = 10000;
    std::string optimizer = "dqn";
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::optional<std::string> materials_dir;
    DqnSettings dqn;
    GaSettings ga;

    bool operator==(const ProblemConfig&) const = default;
};

// Strict parse: unknown keys are an error naming the key; missing
// required keys are reported together in one error; value-level invariant
// violations are aggregated into a single validation report.
ProblemConfig parse_problem_config_text(const std::string& text, const std::string& origin);
ProblemConfig parse_problem_config(const std::filesystem::path& file);

// Full config with every default materialized, as a JSON document that
// parse_problem_config_text accepts back (round trip).
std::string echo_problem_config(const ProblemConfig& config);

// Material lookup directory, in precedence order: FILMFORGE_MATERIALS_DIR
// environment variable, then the config's materials_dir, then the
// directory bundled with the build.
std::filesystem::path resolve_materials_dir(const ProblemConfig& config);

// Everything the optimizers need, with material tables loaded and shared.
struct LoadedProblem {
    ProblemConfig config;
    EnvConfig env;
    StackDesign stack_template;  // free layers at initial thicknesses
};
LoadedProblem load_problem(const ProblemConfig& config);

AgentConfig agent_config_from(const ProblemConfig& config);
GaConfig ga_config_from(const ProblemConfig& config);

}  // namespace filmforge
