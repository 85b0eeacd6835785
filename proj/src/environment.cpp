#include "filmforge/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "filmforge/errors.hpp"

namespace filmforge {

namespace {

void validate_config(const EnvConfig& c) {
    if (c.layer_materials.empty())
        throw ValidationError("environment: at least one free layer required");
    for (const auto& m : c.layer_materials)
        if (!m) throw ValidationError("environment: null layer material");
    if (!c.substrate) throw ValidationError("environment: substrate material required");
    if (c.initial_thicknesses_nm.size() != c.layer_materials.size())
        throw ValidationError("environment: initial thicknesses count (" +
                              std::to_string(c.initial_thicknesses_nm.size()) +
                              ") does not match free layer count (" +
                              std::to_string(c.layer_materials.size()) + ")");
    if (c.precision_level < 1)
        throw ValidationError("environment: precision_level must be >= 1");
    if (c.no_improve_window < 1)
        throw ValidationError("environment: no_improve_window must be >= 1");
    if (c.max_steps_per_episode < 1)
        throw ValidationError("environment: max_steps_per_episode must be >= 1");
    if (!(c.min_thickness_nm >= 0.0) || !(c.min_thickness_nm < c.max_thickness_nm))
        throw ValidationError("environment: thickness bounds must satisfy 0 <= min < max");
    if (!(c.observation_scale > 0.0) || !std::isfinite(c.observation_scale))
        throw ValidationError("environment: observation_scale must be positive and finite");
    if (!(c.band.lo_nm < c.band.hi_nm))
        throw ValidationError("environment: band lower bound must be below upper bound");
    if (c.grid_points < 2)
        throw ValidationError("environment: grid_points must be >= 2");
    for (double t : c.initial_thicknesses_nm)
        if (!(t >= c.min_thickness_nm) || !(t <= c.max_thickness_nm))
            throw ValidationError("environment: initial thickness " + std::to_string(t) +
                                  " nm outside bounds");

    std::vector<MaterialRef> used = c.layer_materials;
    used.push_back(c.substrate);
    if (c.backing) used.push_back(c.backing->material);
    if (c.incident_medium) used.push_back(c.incident_medium);
    auto gaps = coverage_check(used, c.band.lo_nm, c.band.hi_nm);
    if (!gaps.empty()) {
        std::string msg = "environment: material data does not cover the band:";
        for (const auto& g : gaps) {
            char buf[128];
            std::snprintf(buf, sizeof buf, " %s misses %g-%g nm;", g.material.c_str(),
                          g.missing_lo_nm, g.missing_hi_nm);
            msg += buf;
        }
        throw ValidationError(msg);
    }
}

}  // namespace

std::vector<ActionSpec> action_table(const EnvConfig& config) {
    std::vector<ActionSpec> out;
    const int layers = static_cast<int>(config.layer_materials.size());
    out.reserve(static_cast<std::size_t>(2 * config.precision_level * layers));
    for (int layer = 1; layer <= layers; ++layer) {
        for (int k = 0; k < config.precision_level; ++k) {
            const double delta = std::pow(10.0, -k);
            out.push_back({layer, +delta});
            out.push_back({layer, -delta});
        }
    }
    return out;
}

std::vector<double> encode_observation(const EnvState& state, const EnvConfig& config) {
    std::vector<double> obs(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) obs[i] = state[i] / config.observation_scale;
    return obs;
}

EnvState decode_observation(const std::vector<double>& obs, const EnvConfig& config) {
    EnvState state(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) state[i] = obs[i] * config.observation_scale;
    return state;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
    validate_config(config_);
    actions_ = action_table(config_);
}

StackDesign Environment::make_stack(const EnvState& state) const {
    StackDesign stack;
    stack.incident_medium = config_.incident_medium;
    stack.substrate = config_.substrate;
    stack.backing = config_.backing;
    stack.layers.reserve(state.size());
    for (std::size_t i = 0; i < state.size(); ++i)
        stack.layers.push_back({config_.layer_materials[i], state[i]});
    return stack;
}

double Environment::evaluate(const EnvState& state, SpectralResponse* out_response) {
    SpectralResponse response =
        spectral_response(make_stack(state), config_.band, config_.grid_points);
    const double aim = aim_value(response, config_.weights);
    ++evaluations_;
    // Strictly-greater keeps the earliest evaluation on ties.
    if (!has_best_ || aim > best_.aim) {
        best_ = {state, aim, response, evaluations_};
        has_best_ = true;
    }
    if (out_response) *out_response = std::move(response);
    return aim;
}

EnvState Environment::reset() {
    state_ = config_.initial_thicknesses_nm;
    episode_best_aim_ = evaluate(state_, nullptr);
    no_improve_count_ = 0;
    episode_steps_ = 0;
    episode_active_ = true;
    return state_;
}

Transition Environment::step(int action_index) {
    if (!episode_active_)
        throw ContractError("environment: step called without an active episode");
    if (action_index < 0 || action_index >= static_cast<int>(actions_.size()))
        throw ContractError("environment: action index " + std::to_string(action_index) +
                            " outside the action table");

    const ActionSpec& action = actions_[static_cast<std::size_t>(action_index)];
    EnvState next = state_;
    double& th = next[static_cast<std::size_t>(action.layer_index - 1)];
    th = std::clamp(th + action.delta_nm, config_.min_thickness_nm, config_.max_thickness_nm);

    const double aim = evaluate(next, nullptr);
    double reward = 0.0;
    if (aim > episode_best_aim_) {
        reward = aim - episode_best_aim_;
        episode_best_aim_ = aim;
        no_improve_count_ = 0;
    } else {
        ++no_improve_count_;
    }

    bool terminal = false;
    if (aim < config_.aim_threshold) {
        reward = -1.0;  // failed design: stop the episode
        terminal = true;
    }
    if (no_improve_count_ >= config_.no_improve_window) terminal = true;
    ++episode_steps_;
    if (episode_steps_ >= config_.max_steps_per_episode) terminal = true;

    Transition tr{state_, action_index, reward, next, terminal, ++total_steps_, aim};
    state_ = std::move(next);
    if (terminal) episode_active_ = false;
    return tr;
}

BestDesign Environment::best_design() const {
    if (!has_best_) throw ContractError("environment: no design evaluated yet");
    return best_;
}

BestSummary Environment::best_summary() const {
    if (!has_best_) throw ContractError("environment: no design evaluated yet");
    return {best_.aim, best_.spectrum.mean_R, best_.spectrum.mean_T, best_.spectrum.mean_A};
}

void write_trace_csv(const std::vector<Transition>& transitions,
                     const std::vector<ActionSpec>& actions, std::ostream& out) {
    out << "step,layer,delta,aim,reward,terminal\n";
    char buf[160];
    int step = 0;
    for (const auto& tr : transitions) {
        const ActionSpec& a = actions.at(static_cast<std::size_t>(tr.action_index));
        std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%d\n", ++step, a.layer_index,
                      a.delta_nm, tr.aim, tr.reward, tr.terminal ? 1 : 0);
        out << buf;
    }
}

}  // namespace filmforge
