#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace filmforge {

// Fully-connected value network: input (normalized thicknesses) -> 80 relu
// -> 80 relu -> linear head with one Q-value per action. Weights are flat
// row-major arrays; the struct doubles as the gradient container since a
// gradient has exactly the same shape.
struct QNetworkParams {
    static constexpr int kHiddenUnits = 80;

    int input_dim = 0;
    int action_count = 0;
    std::uint64_t init_seed = 0;

    std::vector<double> W1, b1;  // 80 x input_dim, 80
    std::vector<double> W2, b2;  // 80 x 80,        80
    std::vector<double> W3, b3;  // action_count x 80, action_count
};

struct TrainHyperparams {
    double gamma = 0.9;       // discount, in [0, 1)
    double lr0 = 1e-3;        // initial learning rate
    double lr_decay = 0.995;  // multiplicative, applied once per episode
    int batch_size = 32;
    std::uint64_t seed = 0;
};

// One replay sample already encoded for the network.
struct BatchSample {
    std::vector<double> obs;
    int action;
    double reward;
    std::vector<double> next_obs;
    bool terminal;
};

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero, drawn
// from a dedicated stream seeded with `seed` in W1, W2, W3 order.
// Identical seed gives bit-identical parameters.
QNetworkParams init_params(int input_dim, int action_count, std::uint64_t seed);

// q = W3 relu(W2 relu(W1 x + b1) + b2) + b3
std::vector<double> forward(const QNetworkParams& params, const std::vector<double>& obs);

// Per-sample training target: r for terminal transitions, otherwise
// r + gamma * max_a Q(next_obs, a). Targets are constants with respect to
// the loss gradient (no differentiation through this branch).
std::vector<double> compute_targets(const QNetworkParams& params,
                                    const std::vector<BatchSample>& batch, double gamma);

// Mean over the batch of 1/2 (target - Q(obs, action))^2.
double loss_given_targets(const QNetworkParams& params, const std::vector<BatchSample>& batch,
                          const std::vector<double>& targets);
double loss(const QNetworkParams& params, const std::vector<BatchSample>& batch, double gamma);

// Exact reverse-mode gradient of the loss above; the relu subgradient at
// exactly 0 is taken as 0.
QNetworkParams gradient_given_targets(const QNetworkParams& params,
                                      const std::vector<BatchSample>& batch,
                                      const std::vector<double>& targets);
QNetworkParams gradient(const QNetworkParams& params, const std::vector<BatchSample>& batch,
                        double gamma);

// params - lr * grad. Throws NumericError if any entry becomes non-finite.
QNetworkParams sgd_step(const QNetworkParams& params, const QNetworkParams& grad, double lr);

// Text checkpoint: header (dims and seed), then the six parameter arrays
// as hexadecimal floating-point literals. Write -> read is bit-exact.
void save_checkpoint(const QNetworkParams& params, std::ostream& out);
QNetworkParams load_checkpoint(std::istream& in);

}  // namespace filmforge
