#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <vector>

#include "filmforge/optics.hpp"

namespace filmforge {

// A design state is the vector of free-layer thicknesses in nm, ordered
// from the incident side. The fixed backing layer is never part of it.
using EnvState = std::vector<double>;

struct EnvConfig {
    std::vector<MaterialRef> layer_materials;  // free layers, incident-side first
    std::optional<Layer> backing;              // fixed opaque layer, e.g. 200 nm Cu
    MaterialRef substrate;
    MaterialRef incident_medium;               // null = air
    std::vector<double> initial_thicknesses_nm;
    Band band;
    int grid_points = 61;
    AimWeights weights;
    int precision_level = 1;                   // N: deltas 10^0 .. 10^-(N-1)
    int no_improve_window = 50;
    double aim_threshold = -std::numeric_limits<double>::infinity();
    int max_steps_per_episode = 10000;
    double min_thickness_nm = 0.0;
    double max_thickness_nm = 500.0;
    // Observations are thicknesses divided by this constant. A power of
    // two keeps encode/decode exactly invertible in binary floating point.
    double observation_scale = 128.0;
};

// One thickness adjustment: signed delta applied to one free layer.
struct ActionSpec {
    int layer_index;   // 1-based, incident side first
    double delta_nm;   // +-10^0, +-10^-1, ... down to the precision level
};

// One environment step as stored in replay memory. `seq` is issued by the
// environment so training code can prove a sample came from a real step.
struct Transition {
    EnvState state;
    int action_index;
    double reward;
    EnvState next_state;
    bool terminal;
    std::uint64_t seq;
    double aim;        // aim value of next_state, for traces and debugging
};

struct BestDesign {
    EnvState thicknesses_nm;
    double aim;
    SpectralResponse spectrum;
    std::uint64_t evaluation_index;  // earliest evaluation that reached this aim
};

struct BestSummary {
    double aim;
    double mean_R;
    double mean_T;
    double mean_A;
};

// Snapshot of the running best after an episode or generation, the row
// unit of convergence CSVs.
struct ConvergencePoint {
    double best_aim;
    double mean_A;
    double mean_R;
};

// Deterministic enumeration: layer-major, then descending |delta|, then
// + before -. Size is 2 * precision_level * layer count.
std::vector<ActionSpec> action_table(const EnvConfig& config);

std::vector<double> encode_observation(const EnvState& state, const EnvConfig& config);
EnvState decode_observation(const std::vector<double>& obs, const EnvConfig& config);

// The coating-design MDP. Deterministic transitions: an action nudges one
// layer thickness (clamped to bounds), the stack is re-evaluated, and the
// reward is the improvement over the episode's best aim (0 when none).
// Episodes terminate when the aim drops below the configured threshold
// (reward -1), when no improvement happened for `no_improve_window`
// consecutive steps, or when the per-episode step budget runs out.
//
// A single instance is single-threaded; independent instances sharing the
// same immutable material tables may run in parallel.
class Environment {
public:
    explicit Environment(EnvConfig config);

    const EnvConfig& config() const { return config_; }
    const std::vector<ActionSpec>& actions() const { return actions_; }
    int free_layer_count() const { return static_cast<int>(config_.layer_materials.size()); }

    EnvState reset();
    Transition step(int action_index);

    bool episode_active() const { return episode_active_; }
    const EnvState& current_state() const { return state_; }
    double episode_best_aim() const { return episode_best_aim_; }

    std::vector<double> encode(const EnvState& state) const { return encode_observation(state, config_); }
    EnvState decode(const std::vector<double>& obs) const { return decode_observation(obs, config_); }

    // Globally best design across all episodes, ties broken by earliest
    // evaluation. ContractError before the first reset.
    BestDesign best_design() const;
    BestSummary best_summary() const;

    std::uint64_t aim_evaluations() const { return evaluations_; }
    std::uint64_t total_steps() const { return total_steps_; }

    // Stack with the given free-layer thicknesses over the fixed
    // template (backing and substrate included).
    StackDesign make_stack(const EnvState& state) const;

private:
    double evaluate(const EnvState& state, SpectralResponse* out_response);

    EnvConfig config_;
    std::vector<ActionSpec> actions_;
    EnvState state_;
    bool episode_active_ = false;
    double episode_best_aim_ = 0.0;
    int no_improve_count_ = 0;
    int episode_steps_ = 0;
    std::uint64_t total_steps_ = 0;
    std::uint64_t evaluations_ = 0;
    bool has_best_ = false;
    BestDesign best_;
};

// Debug trace rows: `step,layer,delta,aim,reward,terminal`.
void write_trace_csv(const std::vector<Transition>& transitions,
                     const std::vector<ActionSpec>& actions, std::ostream& out);

}  // namespace filmforge
