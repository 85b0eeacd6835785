#include "filmforge/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "filmforge/errors.hpp"
#include "filmforge/rng.hpp"

namespace filmforge {

namespace {

constexpr int H = QNetworkParams::kHiddenUnits;

void check_dims(const QNetworkParams& p) {
    if (p.input_dim < 1 || p.action_count < 1)
        throw ContractError("qnet: dimensions must be >= 1");
    const std::size_t in = static_cast<std::size_t>(p.input_dim);
    const std::size_t actions = static_cast<std::size_t>(p.action_count);
    if (p.W1.size() != static_cast<std::size_t>(H) * in || p.b1.size() != H ||
        p.W2.size() != static_cast<std::size_t>(H) * H || p.b2.size() != H ||
        p.W3.size() != actions * H || p.b3.size() != actions)
        throw ContractError("qnet: parameter array sizes inconsistent with dimensions");
}

// y = W x + b, W row-major (rows x cols)
void affine(const std::vector<double>& W, const std::vector<double>& b, const double* x,
            int rows, int cols, double* y) {
    for (int r = 0; r < rows; ++r) {
        double acc = b[static_cast<std::size_t>(r)];
        const double* wrow = W.data() + static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) acc += wrow[c] * x[c];
        y[r] = acc;
    }
}

struct ForwardCache {
    std::vector<double> z1, h1, z2, h2, q;
};

void forward_cached(const QNetworkParams& p, const std::vector<double>& obs, ForwardCache& c) {
    if (static_cast<int>(obs.size()) != p.input_dim)
        throw ContractError("qnet: observation length " + std::to_string(obs.size()) +
                            " does not match input_dim " + std::to_string(p.input_dim));
    c.z1.resize(H);
    c.h1.resize(H);
    c.z2.resize(H);
    c.h2.resize(H);
    c.q.resize(static_cast<std::size_t>(p.action_count));
    affine(p.W1, p.b1, obs.data(), H, p.input_dim, c.z1.data());
    for (int i = 0; i < H; ++i) c.h1[static_cast<std::size_t>(i)] = std::max(0.0, c.z1[static_cast<std::size_t>(i)]);
    affine(p.W2, p.b2, c.h1.data(), H, H, c.z2.data());
    for (int i = 0; i < H; ++i) c.h2[static_cast<std::size_t>(i)] = std::max(0.0, c.z2[static_cast<std::size_t>(i)]);
    affine(p.W3, p.b3, c.h2.data(), p.action_count, H, c.q.data());
}

double max_q(const QNetworkParams& p, const std::vector<double>& obs, ForwardCache& scratch) {
    forward_cached(p, obs, scratch);
    return *std::max_element(scratch.q.begin(), scratch.q.end());
}

QNetworkParams zeros_like(const QNetworkParams& p) {
    QNetworkParams g;
    g.input_dim = p.input_dim;
    g.action_count = p.action_count;
    g.W1.assign(p.W1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.W2.assign(p.W2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    g.W3.assign(p.W3.size(), 0.0);
    g.b3.assign(p.b3.size(), 0.0);
    return g;
}

void check_batch(const std::vector<BatchSample>& batch, const QNetworkParams& p) {
    if (batch.empty()) throw ContractError("qnet: empty batch");
    for (const auto& s : batch) {
        if (s.action < 0 || s.action >= p.action_count)
            throw ContractError("qnet: batch action index outside the action space");
        if (static_cast<int>(s.obs.size()) != p.input_dim ||
            static_cast<int>(s.next_obs.size()) != p.input_dim)
            throw ContractError("qnet: batch observation length mismatch");
    }
}

void write_array(std::ostream& out, const char* name, const std::vector<double>& v) {
    out << name << ' ' << v.size() << '\n';
    char buf[40];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%a", v[i]);
        out << buf << (((i + 1) % 8 == 0 || i + 1 == v.size()) ? '\n' : ' ');
    }
}

std::vector<double> read_array(std::istream& in, const std::string& expected_name) {
    std::string name;
    std::size_t count = 0;
    if (!(in >> name >> count) || name != expected_name)
        throw ParseError("qnet checkpoint: expected array '" + expected_name + "'");
    std::vector<double> v(count);
    std::string tok;
    for (std::size_t i = 0; i < count; ++i) {
        if (!(in >> tok)) throw ParseError("qnet checkpoint: truncated array '" + name + "'");
        char* end = nullptr;
        v[i] = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ParseError("qnet checkpoint: bad value '" + tok + "' in array '" + name + "'");
    }
    return v;
}

}  // namespace

QNetworkParams init_params(int input_dim, int action_count, std::uint64_t seed) {
    if (input_dim < 1 || action_count < 1)
        throw ContractError("qnet: dimensions must be >= 1");
    QNetworkParams p;
    p.input_dim = input_dim;
    p.action_count = action_count;
    p.init_seed = seed;
    Rng rng(seed);
    auto fill = [&rng](std::vector<double>& w, int fan_in, int fan_out, std::size_t count) {
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        w.resize(count);
        for (auto& x : w) x = rng.uniform(-bound, bound);
    };
    fill(p.W1, input_dim, H, static_cast<std::size_t>(H) * input_dim);
    p.b1.assign(H, 0.0);
    fill(p.W2, H, H, static_cast<std::size_t>(H) * H);
    p.b2.assign(H, 0.0);
    fill(p.W3, H, action_count, static_cast<std::size_t>(action_count) * H);
    p.b3.assign(static_cast<std::size_t>(action_count), 0.0);
    return p;
}

std::vector<double> forward(const QNetworkParams& params, const std::vector<double>& obs) {
    check_dims(params);
    ForwardCache c;
    forward_cached(params, obs, c);
    return c.q;
}

std::vector<double> compute_targets(const QNetworkParams& params,
                                    const std::vector<BatchSample>& batch, double gamma) {
    check_dims(params);
    check_batch(batch, params);
    std::vector<double> targets(batch.size());
    ForwardCache scratch;
    for (std::size_t j = 0; j < batch.size(); ++j) {
        const BatchSample& s = batch[j];
        targets[j] = s.terminal ? s.reward : s.reward + gamma * max_q(params, s.next_obs, scratch);
    }
    return targets;
}

double loss_given_targets(const QNetworkParams& params, const std::vector<BatchSample>& batch,
                          const std::vector<double>& targets) {
    check_dims(params);
    check_batch(batch, params);
    if (targets.size() != batch.size())
        throw ContractError("qnet: target count does not match batch size");
    ForwardCache c;
    double acc = 0.0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
        forward_cached(params, batch[j].obs, c);
        const double diff = targets[j] - c.q[static_cast<std::size_t>(batch[j].action)];
        acc += 0.5 * diff * diff;
    }
    return acc / static_cast<double>(batch.size());
}

double loss(const QNetworkParams& params, const std::vector<BatchSample>& batch, double gamma) {
    return loss_given_targets(params, batch, compute_targets(params, batch, gamma));
}

QNetworkParams gradient_given_targets(const QNetworkParams& params,
                                      const std::vector<BatchSample>& batch,
                                      const std::vector<double>& targets) {
    check_dims(params);
    check_batch(batch, params);
    if (targets.size() != batch.size())
        throw ContractError("qnet: target count does not match batch size");

    QNetworkParams g = zeros_like(params);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ForwardCache c;
    std::vector<double> d2(H), d1(H);

    for (std::size_t j = 0; j < batch.size(); ++j) {
        const BatchSample& s = batch[j];
        forward_cached(params, s.obs, c);
        const int a = s.action;
        // dL/dq_a for this sample; all other output components are 0.
        const double dq = (c.q[static_cast<std::size_t>(a)] - targets[j]) * inv_b;

        const double* w3row = params.W3.data() + static_cast<std::size_t>(a) * H;
        double* gw3row = g.W3.data() + static_cast<std::size_t>(a) * H;
        for (int i = 0; i < H; ++i) gw3row[i] += dq * c.h2[static_cast<std::size_t>(i)];
        g.b3[static_cast<std::size_t>(a)] += dq;

        for (int i = 0; i < H; ++i)
            d2[static_cast<std::size_t>(i)] =
                (c.z2[static_cast<std::size_t>(i)] > 0.0) ? dq * w3row[i] : 0.0;
        for (int r = 0; r < H; ++r) {
            const double dr = d2[static_cast<std::size_t>(r)];
            if (dr == 0.0) continue;
            double* gw2row = g.W2.data() + static_cast<std::size_t>(r) * H;
            for (int i = 0; i < H; ++i) gw2row[i] += dr * c.h1[static_cast<std::size_t>(i)];
            g.b2[static_cast<std::size_t>(r)] += dr;
        }

        for (int i = 0; i < H; ++i) {
            if (c.z1[static_cast<std::size_t>(i)] <= 0.0) {
                d1[static_cast<std::size_t>(i)] = 0.0;
                continue;
            }
            double acc = 0.0;
            for (int r = 0; r < H; ++r)
                acc += d2[static_cast<std::size_t>(r)] * params.W2[static_cast<std::size_t>(r) * H + i];
            d1[static_cast<std::size_t>(i)] = acc;
        }
        for (int r = 0; r < H; ++r) {
            const double dr = d1[static_cast<std::size_t>(r)];
            if (dr == 0.0) continue;
            double* gw1row = g.W1.data() + static_cast<std::size_t>(r) * params.input_dim;
            for (int i = 0; i < params.input_dim; ++i) gw1row[i] += dr * s.obs[static_cast<std::size_t>(i)];
            g.b1[static_cast<std::size_t>(r)] += dr;
        }
    }
    return g;
}

QNetworkParams gradient(const QNetworkParams& params, const std::vector<BatchSample>& batch,
                        double gamma) {
    return gradient_given_targets(params, batch, compute_targets(params, batch, gamma));
}

QNetworkParams sgd_step(const QNetworkParams& params, const QNetworkParams& grad, double lr) {
    check_dims(params);
    if (grad.input_dim != params.input_dim || grad.action_count != params.action_count)
        throw ContractError("qnet: gradient shape does not match parameters");
    if (!(lr > 0.0)) throw ContractError("qnet: learning rate must be positive");
    QNetworkParams out = params;
    auto apply = [lr](std::vector<double>& dst, const std::vector<double>& g) {
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] -= lr * g[i];
            if (!std::isfinite(dst[i]))
                throw NumericError("qnet: non-finite parameter after SGD step (divergence)");
        }
    };
    apply(out.W1, grad.W1);
    apply(out.b1, grad.b1);
    apply(out.W2, grad.W2);
    apply(out.b2, grad.b2);
    apply(out.W3, grad.W3);
    apply(out.b3, grad.b3);
    return out;
}

void save_checkpoint(const QNetworkParams& params, std::ostream& out) {
    check_dims(params);
    out << "filmforge-qnet-v1\n";
    out << "input_dim " << params.input_dim << '\n';
    out << "action_count " << params.action_count << '\n';
    out << "hidden " << H << '\n';
    out << "seed " << params.init_seed << '\n';
    write_array(out, "W1", params.W1);
    write_array(out, "b1", params.b1);
    write_array(out, "W2", params.W2);
    write_array(out, "b2", params.b2);
    write_array(out, "W3", params.W3);
    write_array(out, "b3", params.b3);
}

QNetworkParams load_checkpoint(std::istream& in) {
    std::string magic;
    if (!(in >> magic) || magic != "filmforge-qnet-v1")
        throw ParseError("qnet checkpoint: unrecognized header");
    auto read_field = [&in](const char* key) -> long long {
        std::string name;
        long long value = 0;
        if (!(in >> name >> value) || name != key)
            throw ParseError(std::string("qnet checkpoint: expected field '") + key + "'");
        return value;
    };
    QNetworkParams p;
    p.input_dim = static_cast<int>(read_field("input_dim"));
    p.action_count = static_cast<int>(read_field("action_count"));
    const long long hidden = read_field("hidden");
    if (hidden != H)
        throw ParseError("qnet checkpoint: hidden width " + std::to_string(hidden) +
                         " not supported (expected " + std::to_string(H) + ")");
    p.init_seed = static_cast<std::uint64_t>(read_field("seed"));
    p.W1 = read_array(in, "W1");
    p.b1 = read_array(in, "b1");
    p.W2 = read_array(in, "W2");
    p.b2 = read_array(in, "b2");
    p.W3 = read_array(in, "W3");
    p.b3 = read_array(in, "b3");
    check_dims(p);
    return p;
}

}  // namespace filmforge
