#pragma once

// One-hidden-layer perceptron (ReLU hidden units, linear outputs) with
// analytic gradients. Parameters live in one flat vector:
//   [W1 (hidden x in, row-major) | b1 (hidden) | W2 (out x hidden) | b2 (out)]
// and gradients use the same layout.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "vanetqos/rng.hpp"

namespace vanetqos {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Mlp {
public:
    struct Cache {
        std::vector<double> input;
        std::vector<double> hidden_pre;
        std::vector<double> hidden;
        std::vector<double> output;
    };

    Mlp() = default;

    Mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs)
        : in_(inputs), hidden_(hidden), out_(outputs), params_(parameter_count(inputs, hidden, outputs), 0.0) {}

    /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    static Mlp random(std::size_t inputs, std::size_t hidden, std::size_t outputs, Rng& rng) {
        Mlp net(inputs, hidden, outputs);
        const double b1 = 1.0 / std::sqrt(static_cast<double>(inputs));
        const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden));
        const std::size_t layer1 = hidden * inputs + hidden;
        for (std::size_t k = 0; k < net.params_.size(); ++k) {
            const double bound = k < layer1 ? b1 : b2;
            net.params_[k] = rng.uniform(-bound, bound);
        }
        return net;
    }

    static constexpr std::size_t parameter_count(std::size_t in, std::size_t hidden, std::size_t out) {
        return hidden * in + hidden + out * hidden + out;
    }

    std::size_t inputs() const noexcept { return in_; }
    std::size_t hidden_units() const noexcept { return hidden_; }
    std::size_t outputs() const noexcept { return out_; }

    std::span<double> params() noexcept { return params_; }
    std::span<const double> params() const noexcept { return params_; }

    Cache forward(std::span<const double> x) const {
        if (x.size() != in_) throw std::invalid_argument("mlp input has wrong dimension");
        for (double v : x)
            if (!std::isfinite(v)) throw NumericalError("mlp input is not finite");
        Cache c;
        c.input.assign(x.begin(), x.end());
        c.hidden_pre.assign(hidden_, 0.0);
        c.hidden.assign(hidden_, 0.0);
        c.output.assign(out_, 0.0);
        for (std::size_t h = 0; h < hidden_; ++h) {
            double z = b1()[h];
            const double* w = &w1()[h * in_];
            for (std::size_t i = 0; i < in_; ++i) z += w[i] * x[i];
            c.hidden_pre[h] = z;
            c.hidden[h] = z > 0.0 ? z : 0.0;
        }
        for (std::size_t o = 0; o < out_; ++o) {
            double z = b2()[o];
            const double* w = &w2()[o * hidden_];
            for (std::size_t h = 0; h < hidden_; ++h) z += w[h] * c.hidden[h];
            c.output[o] = z;
        }
        return c;
    }

    std::vector<double> predict(std::span<const double> x) const { return forward(x).output; }

    /// d(upstream . output)/d(params) for the cached forward pass.
    std::vector<double> gradients(const Cache& c, std::span<const double> upstream) const {
        if (upstream.size() != out_) throw std::invalid_argument("upstream gradient has wrong dimension");
        std::vector<double> g(params_.size(), 0.0);
        accumulate_gradients(c, upstream, g);
        return g;
    }

    /// Adds the gradients of one sample into `g` (same layout as params).
    void accumulate_gradients(const Cache& c, std::span<const double> upstream, std::span<double> g) const {
        double* gw1 = g.data();
        double* gb1 = gw1 + hidden_ * in_;
        double* gw2 = gb1 + hidden_;
        double* gb2 = gw2 + out_ * hidden_;
        std::vector<double> d_hidden(hidden_, 0.0);
        for (std::size_t o = 0; o < out_; ++o) {
            const double d = upstream[o];
            if (d == 0.0) continue;
            gb2[o] += d;
            const double* w = &w2()[o * hidden_];
            for (std::size_t h = 0; h < hidden_; ++h) {
                gw2[o * hidden_ + h] += d * c.hidden[h];
                d_hidden[h] += w[h] * d;
            }
        }
        for (std::size_t h = 0; h < hidden_; ++h) {
            if (c.hidden_pre[h] <= 0.0 || d_hidden[h] == 0.0) continue;
            gb1[h] += d_hidden[h];
            for (std::size_t i = 0; i < in_; ++i) gw1[h * in_ + i] += d_hidden[h] * c.input[i];
        }
    }

    /// params += scale * grad; aborts if any parameter becomes non-finite.
    void apply(std::span<const double> grad, double scale) {
        for (std::size_t k = 0; k < params_.size(); ++k) params_[k] += scale * grad[k];
        for (double p : params_)
            if (!std::isfinite(p)) throw NumericalError("mlp parameters diverged to a non-finite value");
    }

    friend bool operator==(const Mlp&, const Mlp&) = default;

private:
    const double* w1() const { return params_.data(); }
    const double* b1() const { return w1() + hidden_ * in_; }
    const double* w2() const { return b1() + hidden_; }
    const double* b2() const { return w2() + out_ * hidden_; }

    std::size_t in_ = 0;
    std::size_t hidden_ = 0;
    std::size_t out_ = 0;
    std::vector<double> params_;
};

/// Numerically stable softmax.
inline std::vector<double> softmax(std::span<const double> z) {
    std::vector<double> p(z.begin(), z.end());
    if (p.empty()) return p;
    double m = p[0];
    for (double v : p) m = v > m ? v : m;
    double sum = 0.0;
    for (double& v : p) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace vanetqos
