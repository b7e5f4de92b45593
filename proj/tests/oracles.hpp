#pragma once

// Independent reference computations the library is checked against. None of
// these share code with the implementations they verify.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "vanetqos/agents/mlp.hpp"
#include "vanetqos/rng.hpp"

namespace oracle {

/// Weighted water-filling by bisection on the fill level: x_i = min(d_i, w_i * level)
/// with sum x_i = capacity (or x = d when everything fits).
inline std::vector<double> waterfill(const std::vector<double>& demand, const std::vector<double>& weight,
                                     double capacity) {
    const double total = std::accumulate(demand.begin(), demand.end(), 0.0);
    if (total <= capacity) return demand;
    auto filled = [&](double level) {
        double s = 0.0;
        for (std::size_t i = 0; i < demand.size(); ++i) s += std::min(demand[i], weight[i] * level);
        return s;
    };
    double lo = 0.0, hi = 1.0;
    while (filled(hi) < capacity) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (filled(mid) < capacity ? lo : hi) = mid;
    }
    std::vector<double> x(demand.size());
    for (std::size_t i = 0; i < demand.size(); ++i) x[i] = std::min(demand[i], weight[i] * hi);
    return x;
}

inline std::vector<double> waterfill(const std::vector<double>& demand, double capacity) {
    return waterfill(demand, std::vector<double>(demand.size(), 1.0), capacity);
}

/// Central differences of upstream . net(x) with respect to every parameter.
inline std::vector<double> numeric_gradient(vanetqos::Mlp net, std::span<const double> x,
                                            std::span<const double> upstream, double h) {
    auto objective = [&](const vanetqos::Mlp& n) {
        const auto y = n.predict(x);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += upstream[i] * y[i];
        return s;
    };
    std::vector<double> g(net.params().size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double p = net.params()[k];
        net.params()[k] = p + h;
        const double up = objective(net);
        net.params()[k] = p - h;
        const double down = objective(net);
        net.params()[k] = p;
        g[k] = (up - down) / (2.0 * h);
    }
    return g;
}

/// max_k |a_k - n_k| / max(|a_k|, |n_k|, floor)
inline double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                                 double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        const double scale = std::max({std::abs(analytic[k]), std::abs(numeric[k]), floor});
        worst = std::max(worst, std::abs(analytic[k] - numeric[k]) / scale);
    }
    return worst;
}

struct GradientCheck {
    double worst = 0.0;
    int nets = 0;
};

/// Analytic vs central-difference gradients over `nets` random networks with
/// random inputs and upstream vectors.
inline GradientCheck gradient_check(int nets, double h, std::uint64_t seed) {
    vanetqos::Rng rng(seed);
    GradientCheck out;
    for (int n = 0; n < nets; ++n) {
        const std::size_t in = 2 + rng.index(10), hidden = 2 + rng.index(32), outs = 1 + rng.index(8);
        auto net = vanetqos::Mlp::random(in, hidden, outs, rng);
        std::vector<double> x(in), up(outs);
        for (auto& v : x) v = rng.uniform(-1.0, 1.0);
        for (auto& v : up) v = rng.uniform(-1.0, 1.0);
        const auto analytic = net.gradients(net.forward(x), up);
        const auto numeric = numeric_gradient(net, x, up, h);
        out.worst = std::max(out.worst, max_relative_error(analytic, numeric));
        ++out.nets;
    }
    return out;
}

}  // namespace oracle
