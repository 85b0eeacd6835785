#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "filmforge/environment.hpp"
#include "filmforge/qnet.hpp"
#include "filmforge/rng.hpp"

namespace filmforge {

// Bounded FIFO of environment transitions; eviction is strictly
// oldest-first. Index 0 addresses the oldest stored element.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void store(Transition transition);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // slot of the oldest element once full
    std::vector<Transition> storage_;
};

// Uniform sample of `batch_size` distinct indices (oldest-first indexing).
// Empty optional when the memory holds fewer than batch_size transitions
// (warm-up not reached); the caller skips the learning step.
std::optional<std::vector<std::size_t>> sample_minibatch_indices(const ReplayMemory& memory,
                                                                 std::size_t batch_size, Rng& rng);
std::optional<std::vector<Transition>> sample_minibatch(const ReplayMemory& memory,
                                                        std::size_t batch_size, Rng& rng);

struct ExplorationSchedule {
    double eps_start = 1.0;
    double eps_end = 0.1;
    int decay_steps = 20000;
};

// Linear from eps_start at step 0 to eps_end at decay_steps, constant
// afterward. Endpoints are returned exactly.
double epsilon_at(const ExplorationSchedule& schedule, std::uint64_t step);

// With probability epsilon a uniformly random action, otherwise the argmax
// of the Q-values with ties broken by lowest index. Consumes one uniform
// draw for the coin, plus one more only on the random branch.
int select_action(const QNetworkParams& params, const std::vector<double>& obs, double epsilon,
                  Rng& rng);

struct AgentConfig {
    TrainHyperparams hyper;
    ExplorationSchedule schedule;
    std::size_t replay_capacity = 10000;
    int episodes = 100;
    // Optional stabilisation: compute targets from a periodically synced
    // copy of the network instead of the live one.
    bool use_target_network = false;
    int target_sync_period = 500;
};

struct AgentRunReport {
    std::vector<double> best_thicknesses_nm;
    double best_aim = 0.0;
    SpectralResponse best_spectrum;
    std::vector<ConvergencePoint> curve;  // one point per completed episode
    std::uint64_t total_steps = 0;
    std::uint64_t aim_evaluations = 0;
    std::uint64_t seed = 0;
    QNetworkParams final_params;
};

// Q-learning over the coating environment: per step select an action
// (epsilon-greedy on the global step), apply it, store the transition,
// and once the memory reaches batch_size take one SGD step on a uniform
// minibatch. The learning rate decays multiplicatively per episode.
//
// One seeded stream drives the whole run; draws occur in a fixed order
// per step (action coin, random action if exploring, then batch indices),
// so a run is byte-reproducible from its seed.
AgentRunReport train(Environment& env, const AgentConfig& config);

}  // namespace filmforge
