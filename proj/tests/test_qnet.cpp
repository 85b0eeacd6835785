#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <vector>

#include "filmforge/errors.hpp"
#include "filmforge/qnet.hpp"
#include "filmforge/rng.hpp"

#ifdef FILMFORGE_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace filmforge;

namespace {

bool same_bytes(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

bool same_params(const QNetworkParams& a, const QNetworkParams& b) {
    return a.input_dim == b.input_dim && a.action_count == b.action_count &&
           a.init_seed == b.init_seed && same_bytes(a.W1, b.W1) && same_bytes(a.b1, b.b1) &&
           same_bytes(a.W2, b.W2) && same_bytes(a.b2, b.b2) && same_bytes(a.W3, b.W3) &&
           same_bytes(a.b3, b.b3);
}

QNetworkParams zero_like(int input_dim, int action_count) {
    QNetworkParams p;
    p.input_dim = input_dim;
    p.action_count = action_count;
    const int h = QNetworkParams::kHiddenUnits;
    p.W1.assign(static_cast<std::size_t>(h * input_dim), 0.0);
    p.b1.assign(static_cast<std::size_t>(h), 0.0);
    p.W2.assign(static_cast<std::size_t>(h * h), 0.0);
    p.b2.assign(static_cast<std::size_t>(h), 0.0);
    p.W3.assign(static_cast<std::size_t>(action_count * h), 0.0);
    p.b3.assign(static_cast<std::size_t>(action_count), 0.0);
    return p;
}

std::vector<double> random_obs(Rng& rng, int dim) {
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

std::vector<BatchSample> random_batch(Rng& rng, int input_dim, int action_count, int size) {
    std::vector<BatchSample> batch;
    for (int i = 0; i < size; ++i) {
        BatchSample s;
        s.obs = random_obs(rng, input_dim);
        s.action = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(action_count)));
        s.reward = rng.uniform(-1.0, 1.0);
        s.next_obs = random_obs(rng, input_dim);
        s.terminal = rng.uniform01() < 0.25;
        batch.push_back(std::move(s));
    }
    return batch;
}

// Smallest |pre-activation| across both hidden layers for one input. A
// central difference only probes a derivative where the loss is smooth, so
// finite-difference tests reject inputs that park a relu unit within the
// differencing step of its kink.
double min_abs_preactivation(const QNetworkParams& p, const std::vector<double>& obs) {
    const int H = QNetworkParams::kHiddenUnits;
    double min_abs = std::numeric_limits<double>::infinity();
    std::vector<double> a1(static_cast<std::size_t>(H));
    for (int i = 0; i < H; ++i) {
        double z = p.b1[static_cast<std::size_t>(i)];
        for (int j = 0; j < p.input_dim; ++j)
            z += p.W1[static_cast<std::size_t>(i * p.input_dim + j)] * obs[static_cast<std::size_t>(j)];
        min_abs = std::min(min_abs, std::abs(z));
        a1[static_cast<std::size_t>(i)] = z > 0.0 ? z : 0.0;
    }
    for (int i = 0; i < H; ++i) {
        double z = p.b2[static_cast<std::size_t>(i)];
        for (int j = 0; j < H; ++j) z += p.W2[static_cast<std::size_t>(i * H + j)] * a1[static_cast<std::size_t>(j)];
        min_abs = std::min(min_abs, std::abs(z));
    }
    return min_abs;
}

// Flattened parameter access so finite differencing can walk every block
// with one loop.
std::vector<std::vector<double>*> blocks_of(QNetworkParams& p) {
    return {&p.W1, &p.b1, &p.W2, &p.b2, &p.W3, &p.b3};
}

}  // namespace

TEST_SUITE("qnet") {

TEST_CASE("initialization shapes, zero biases, and uniform bounds") {
    auto p = init_params(3, 18, 99);
    const int h = QNetworkParams::kHiddenUnits;
    CHECK(h == 80);
    CHECK(p.input_dim == 3);
    CHECK(p.action_count == 18);
    REQUIRE(p.W1.size() == static_cast<std::size_t>(h * 3));
    REQUIRE(p.b1.size() == static_cast<std::size_t>(h));
    REQUIRE(p.W2.size() == static_cast<std::size_t>(h * h));
    REQUIRE(p.b2.size() == static_cast<std::size_t>(h));
    REQUIRE(p.W3.size() == static_cast<std::size_t>(18 * h));
    REQUIRE(p.b3.size() == 18);
    CHECK(std::all_of(p.b1.begin(), p.b1.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(p.b2.begin(), p.b2.end(), [](double v) { return v == 0.0; }));
    CHECK(std::all_of(p.b3.begin(), p.b3.end(), [](double v) { return v == 0.0; }));

    auto bound_ok = [](const std::vector<double>& w, int fan_in, int fan_out) {
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        return std::all_of(w.begin(), w.end(),
                           [&](double v) { return std::abs(v) <= limit; });
    };
    CHECK(bound_ok(p.W1, 3, h));
    CHECK(bound_ok(p.W2, h, h));
    CHECK(bound_ok(p.W3, h, 18));

    // Not all weights collapse to one value: the draw really is random.
    CHECK(*std::max_element(p.W1.begin(), p.W1.end()) >
          *std::min_element(p.W1.begin(), p.W1.end()));
}

TEST_CASE("initialization is reproducible from the seed alone") {
    auto a = init_params(5, 10, 1234);
    auto b = init_params(5, 10, 1234);
    CHECK(same_params(a, b));
    auto c = init_params(5, 10, 1235);
    CHECK(!same_bytes(a.W1, c.W1));
}

TEST_CASE("an all-zero network outputs all-zero Q-values") {
    auto p = zero_like(4, 6);
    auto q = forward(p, {0.3, -0.7, 0.1, 0.9});
    REQUIRE(q.size() == 6);
    for (double v : q) CHECK(v == 0.0);
}

TEST_CASE("forward rejects an observation of the wrong width") {
    auto p = init_params(3, 4, 7);
    CHECK_THROWS_AS((void)forward(p, {0.1, 0.2}), ContractError);
}

#ifdef FILMFORGE_HAVE_EIGEN
TEST_CASE("forward matches an independent dense-matrix evaluation") {
    const int in = 5, out = 9, h = QNetworkParams::kHiddenUnits;
    auto p = init_params(in, out, 2024);
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        auto obs = random_obs(rng, in);
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                       Eigen::RowMajor>>
            W1(p.W1.data(), h, in), W2(p.W2.data(), h, h), W3(p.W3.data(), out, h);
        Eigen::Map<const Eigen::VectorXd> b1(p.b1.data(), h), b2(p.b2.data(), h),
            b3(p.b3.data(), out);
        Eigen::Map<const Eigen::VectorXd> x(obs.data(), in);
        Eigen::VectorXd h1 = (W1 * x + b1).cwiseMax(0.0);
        Eigen::VectorXd h2 = (W2 * h1 + b2).cwiseMax(0.0);
        Eigen::VectorXd q = W3 * h2 + b3;
        auto got = forward(p, obs);
        REQUIRE(got.size() == static_cast<std::size_t>(out));
        for (int i = 0; i < out; ++i)
            CHECK(std::abs(got[static_cast<std::size_t>(i)] - q(i)) <=
                  1e-12 * std::max(1.0, std::abs(q(i))));
    }
}
#endif

TEST_CASE("targets bootstrap from the best next action unless terminal") {
    // Bias-only network: Q is b3 for every observation, so max Q' = 2.
    auto p = zero_like(2, 3);
    p.b3 = {0.0, 2.0, 1.0};

    BatchSample s;
    s.obs = {0.1, 0.2};
    s.action = 1;
    s.reward = 1.0;
    s.next_obs = {0.3, 0.4};
    s.terminal = false;

    auto targets = compute_targets(p, {s}, 0.9);
    REQUIRE(targets.size() == 1);
    CHECK(targets[0] == doctest::Approx(2.8).epsilon(1e-15));

    // Q(s, a=1) is 2, so the squared error is (2.8 - 2)^2 / 2 = 0.32.
    CHECK(loss(p, {s}, 0.9) == doctest::Approx(0.32).epsilon(1e-12));

    s.terminal = true;
    auto t2 = compute_targets(p, {s}, 0.9);
    CHECK(t2[0] == 1.0);  // terminal: reward only, no bootstrap

    s.reward = -1.0;
    p.b3 = {0.0, -1.0, 0.0};
    CHECK(loss(p, {s}, 0.9) == 0.0);  // perfect fit

    // gamma = 0 is the myopic special case even when not terminal.
    s.terminal = false;
    auto t3 = compute_targets(p, {s}, 0.0);
    CHECK(t3[0] == -1.0);
}

TEST_CASE("loss equals the mean half-squared target error") {
    Rng rng(3);
    auto p = init_params(3, 5, 77);
    auto batch = random_batch(rng, 3, 5, 16);
    auto targets = compute_targets(p, batch, 0.9);
    double manual = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double q = forward(p, batch[i].obs)[static_cast<std::size_t>(batch[i].action)];
        manual += 0.5 * (targets[i] - q) * (targets[i] - q);
    }
    manual /= static_cast<double>(batch.size());
    CHECK(loss_given_targets(p, batch, targets) == doctest::Approx(manual).epsilon(1e-14));
    CHECK(loss(p, batch, 0.9) == doctest::Approx(manual).epsilon(1e-14));
    CHECK(loss(p, batch, 0.9) >= 0.0);
}

TEST_CASE("gradient vanishes exactly on a perfectly fitted batch") {
    auto p = zero_like(2, 3);
    p.b3 = {0.5, -0.25, 0.75};
    BatchSample s;
    s.obs = {0.4, -0.2};
    s.action = 2;
    s.reward = 0.75;
    s.next_obs = {0.0, 0.0};
    s.terminal = true;  // target = 0.75 = Q(s, 2) exactly
    auto g = gradient(p, {s}, 0.9);
    for (auto* blk : blocks_of(g))
        for (double v : *blk) CHECK(v == 0.0);
}

TEST_CASE("duplicating every sample leaves the mean gradient unchanged") {
    Rng rng(9);
    auto p = init_params(3, 4, 31);
    auto batch = random_batch(rng, 3, 4, 8);
    auto doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());
    auto targets = compute_targets(p, batch, 0.9);
    auto targets2 = compute_targets(p, doubled, 0.9);
    auto g1 = gradient_given_targets(p, batch, targets);
    auto g2 = gradient_given_targets(p, doubled, targets2);
    auto b1s = blocks_of(g1);
    auto b2s = blocks_of(g2);
    for (std::size_t b = 0; b < b1s.size(); ++b) {
        REQUIRE(b1s[b]->size() == b2s[b]->size());
        for (std::size_t i = 0; i < b1s[b]->size(); ++i)
            CHECK((*b1s[b])[i] == doctest::Approx((*b2s[b])[i]).epsilon(1e-12));
    }
}

TEST_CASE("every parameter block passes a central finite-difference check") {
    Rng rng(17);
    auto p = init_params(3, 4, 101);
    auto batch = random_batch(rng, 3, 4, 6);
    // The loss only runs the network forward on `obs`; keep those inputs
    // clear of relu kinks so the central difference stays a derivative.
    for (auto& s : batch)
        while (min_abs_preactivation(p, s.obs) < 1e-3) s.obs = random_obs(rng, 3);
    auto targets = compute_targets(p, batch, 0.9);  // frozen targets
    auto analytic = gradient_given_targets(p, batch, targets);

    const double step = 1e-5;
    auto an_blocks = blocks_of(analytic);
    auto pb = blocks_of(p);
    int checked = 0;
    for (std::size_t b = 0; b < pb.size(); ++b) {
        // All bias entries plus a spread of weight entries per block.
        std::size_t n = pb[b]->size();
        std::size_t stride = n <= 90 ? 1 : n / 90;
        for (std::size_t i = 0; i < n; i += stride) {
            double saved = (*pb[b])[i];
            (*pb[b])[i] = saved + step;
            double up = loss_given_targets(p, batch, targets);
            (*pb[b])[i] = saved - step;
            double down = loss_given_targets(p, batch, targets);
            (*pb[b])[i] = saved;
            double fd = (up - down) / (2.0 * step);
            double an = (*an_blocks[b])[i];
            double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
            CAPTURE(b);
            CAPTURE(i);
            CHECK(std::abs(fd - an) / denom < 1e-4);
            ++checked;
        }
    }
    CHECK(checked > 400);
}

TEST_CASE("sgd leaves parameters alone on a zero gradient") {
    auto p = init_params(3, 4, 5);
    auto g = zero_like(3, 4);
    auto stepped = sgd_step(p, g, 0.01);
    CHECK(same_params(p, stepped));
}

TEST_CASE("sgd with unit rate and gradient equal to the parameters zeroes them") {
    auto p = init_params(3, 4, 5);
    auto stepped = sgd_step(p, p, 1.0);
    for (auto* blk : blocks_of(stepped))
        for (double v : *blk) CHECK(v == 0.0);
}

TEST_CASE("two steps at lr then lr/2 match one step at 1.5 lr for a fixed gradient") {
    // Dyadic values keep every product exact, so the comparison is bitwise.
    auto p = zero_like(2, 2);
    auto g = zero_like(2, 2);
    double fill = 0.5;
    for (auto* blk : blocks_of(p))
        for (auto& v : *blk) v = (fill += 0.25);
    fill = -1.0;
    for (auto* blk : blocks_of(g))
        for (auto& v : *blk) v = (fill += 0.125);

    const double lr = 0.25;
    auto twice = sgd_step(sgd_step(p, g, lr), g, lr / 2.0);
    auto once = sgd_step(p, g, 1.5 * lr);
    CHECK(same_bytes(twice.W1, once.W1));
    CHECK(same_bytes(twice.b1, once.b1));
    CHECK(same_bytes(twice.W2, once.W2));
    CHECK(same_bytes(twice.b2, once.b2));
    CHECK(same_bytes(twice.W3, once.W3));
    CHECK(same_bytes(twice.b3, once.b3));
}

TEST_CASE("a small sgd step on the analytic gradient reduces the loss") {
    Rng rng(23);
    auto p = init_params(4, 6, 404);
    auto batch = random_batch(rng, 4, 6, 12);
    auto targets = compute_targets(p, batch, 0.9);
    double before = loss_given_targets(p, batch, targets);
    // The fitted action values generally differ from the targets, so the
    // gradient is nonzero and a small step must descend.
    REQUIRE(before > 0.0);
    auto g = gradient_given_targets(p, batch, targets);
    auto stepped = sgd_step(p, g, 1e-4);
    double after = loss_given_targets(stepped, batch, targets);
    CHECK(after < before);
}

TEST_CASE("sgd rejects steps that produce non-finite parameters") {
    auto p = init_params(2, 2, 8);
    auto g = zero_like(2, 2);
    g.W1[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)sgd_step(p, g, 1.0), NumericError);
}

TEST_CASE("training loop pieces are bit-deterministic") {
    Rng rng(29);
    auto batch = random_batch(rng, 3, 5, 10);
    auto p = init_params(3, 5, 999);
    auto g1 = gradient(p, batch, 0.9);
    auto g2 = gradient(p, batch, 0.9);
    CHECK(same_bytes(g1.W1, g2.W1));
    CHECK(same_bytes(g1.W2, g2.W2));
    CHECK(same_bytes(g1.W3, g2.W3));
    auto s1 = sgd_step(p, g1, 1e-3);
    auto s2 = sgd_step(p, g2, 1e-3);
    CHECK(same_params(s1, s2));
}

TEST_CASE("checkpoints survive a write/read round trip bit-exactly") {
    auto p = init_params(3, 18, 777);
    // Dirty the parameters so the file is not just the init pattern.
    Rng rng(31);
    auto batch = random_batch(rng, 3, 18, 4);
    p = sgd_step(p, gradient(p, batch, 0.9), 1e-3);

    std::ostringstream out;
    save_checkpoint(p, out);
    std::istringstream in(out.str());
    auto q = load_checkpoint(in);
    CHECK(same_params(p, q));
}

TEST_CASE("corrupted checkpoints are rejected as parse errors") {
    auto p = init_params(2, 3, 1);
    std::ostringstream out;
    save_checkpoint(p, out);
    std::string text = out.str();

    std::istringstream bad_header("not a checkpoint\n");
    CHECK_THROWS_AS((void)load_checkpoint(bad_header), ParseError);

    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS((void)load_checkpoint(truncated), ParseError);
}

}  // TEST_SUITE
