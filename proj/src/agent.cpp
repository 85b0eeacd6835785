#include "filmforge/agent.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "filmforge/errors.hpp"

namespace filmforge {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw ValidationError("replay memory: capacity must be >= 1");
    storage_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayMemory::store(Transition transition) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(transition));
        return;
    }
    // Full: overwrite the oldest slot and advance the ring head.
    storage_[head_] = std::move(transition);
    head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayMemory::at(std::size_t i) const {
    if (i >= storage_.size()) throw ContractError("replay memory: index out of range");
    return storage_[(head_ + i) % storage_.size()];
}

std::optional<std::vector<std::size_t>> sample_minibatch_indices(const ReplayMemory& memory,
                                                                 std::size_t batch_size, Rng& rng) {
    if (batch_size == 0) throw ContractError("replay memory: batch_size must be >= 1");
    if (memory.size() < batch_size) return std::nullopt;
    // Partial Fisher-Yates over the index range: uniform without
    // replacement, one rng draw per selected element.
    std::vector<std::size_t> idx(memory.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < batch_size; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(batch_size);
    return idx;
}

std::optional<std::vector<Transition>> sample_minibatch(const ReplayMemory& memory,
                                                        std::size_t batch_size, Rng& rng) {
    auto indices = sample_minibatch_indices(memory, batch_size, rng);
    if (!indices) return std::nullopt;
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (std::size_t i : *indices) batch.push_back(memory.at(i));
    return batch;
}

double epsilon_at(const ExplorationSchedule& schedule, std::uint64_t step) {
    if (schedule.decay_steps < 1) throw ValidationError("exploration: decay_steps must be >= 1");
    if (!(1.0 >= schedule.eps_start && schedule.eps_start >= schedule.eps_end &&
          schedule.eps_end >= 0.0))
        throw ValidationError("exploration: need 1 >= eps_start >= eps_end >= 0");
    if (step == 0) return schedule.eps_start;
    if (step >= static_cast<std::uint64_t>(schedule.decay_steps)) return schedule.eps_end;
    const double t = static_cast<double>(step) / static_cast<double>(schedule.decay_steps);
    return schedule.eps_start + (schedule.eps_end - schedule.eps_start) * t;
}

int select_action(const QNetworkParams& params, const std::vector<double>& obs, double epsilon,
                  Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ContractError("select_action: epsilon must be in [0, 1]");
    const double coin = rng.uniform01();
    if (coin < epsilon)
        return static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(params.action_count)));
    const std::vector<double> q = forward(params, obs);
    int best = 0;
    for (int a = 1; a < static_cast<int>(q.size()); ++a)
        if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
    return best;
}

AgentRunReport train(Environment& env, const AgentConfig& config) {
    if (config.episodes < 0) throw ValidationError("agent: episodes must be >= 0");
    if (config.hyper.batch_size < 1) throw ValidationError("agent: batch_size must be >= 1");
    if (!(config.hyper.gamma >= 0.0 && config.hyper.gamma < 1.0))
        throw ValidationError("agent: gamma must be in [0, 1)");
    if (!(config.hyper.lr0 > 0.0)) throw ValidationError("agent: lr0 must be positive");
    if (!(config.hyper.lr_decay > 0.0 && config.hyper.lr_decay <= 1.0))
        throw ValidationError("agent: lr_decay must be in (0, 1]");

    const int input_dim = env.free_layer_count();
    const int action_count = static_cast<int>(env.actions().size());
    QNetworkParams params = init_params(input_dim, action_count, config.hyper.seed);
    QNetworkParams target_params = params;
    Rng rng(config.hyper.seed);
    ReplayMemory memory(config.replay_capacity);
    const std::size_t batch_size = static_cast<std::size_t>(config.hyper.batch_size);

    AgentRunReport report;
    report.seed = config.hyper.seed;
    report.curve.reserve(static_cast<std::size_t>(config.episodes));

    double lr = config.hyper.lr0;
    std::uint64_t global_step = 0;
    std::vector<BatchSample> samples;
    std::uint64_t last_env_seq = 0;

    if (config.episodes == 0) env.reset();  // report the initial design alone

    for (int episode = 0; episode < config.episodes; ++episode) {
        EnvState state = env.reset();
        while (env.episode_active()) {
            const double eps = epsilon_at(config.schedule, global_step);
            const int action = select_action(params, env.encode(state), eps, rng);
            Transition tr = env.step(action);
            if (tr.seq <= last_env_seq)
                throw ContractError("agent: environment sequence number not increasing");
            last_env_seq = tr.seq;
            state = tr.next_state;
            memory.store(std::move(tr));

            auto indices = sample_minibatch_indices(memory, batch_size, rng);
            if (indices) {
                samples.clear();
                samples.reserve(batch_size);
                for (std::size_t i : *indices) {
                    const Transition& t = memory.at(i);
                    samples.push_back({env.encode(t.state), t.action_index, t.reward,
                                       env.encode(t.next_state), t.terminal});
                }
                const QNetworkParams& target_source =
                    config.use_target_network ? target_params : params;
                const std::vector<double> targets =
                    compute_targets(target_source, samples, config.hyper.gamma);
                QNetworkParams grad = gradient_given_targets(params, samples, targets);
                try {
                    params = sgd_step(params, grad, lr);
                } catch (const NumericError& e) {
                    throw NumericError(std::string(e.what()) + " at episode " +
                                       std::to_string(episode) + ", step " +
                                       std::to_string(global_step));
                }
            }

            ++global_step;
            if (config.use_target_network && config.target_sync_period > 0 &&
                global_step % static_cast<std::uint64_t>(config.target_sync_period) == 0)
                target_params = params;
        }
        lr *= config.hyper.lr_decay;
        const BestSummary best = env.best_summary();
        report.curve.push_back({best.aim, best.mean_A, best.mean_R});
    }

    BestDesign best = env.best_design();
    report.best_thicknesses_nm = std::move(best.thicknesses_nm);
    report.best_aim = best.aim;
    report.best_spectrum = std::move(best.spectrum);
    report.total_steps = env.total_steps();
    report.aim_evaluations = env.aim_evaluations();
    report.final_params = std::move(params);
    return report;
}

}  // namespace filmforge
