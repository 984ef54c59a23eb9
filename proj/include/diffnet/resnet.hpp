#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "nonlinearity.hpp"
#include "signal.hpp"

namespace diffnet {

/// How a stencil sees samples beyond the ends of the signal.
enum class Boundary {
    Reflect,  // half-sample mirror: x_{-1} := x_0, x_{N} := x_{N-1}, ...
    Zero,     // zero padding; used for flux fields whose boundary flux vanishes
};

/// A centred convolution stencil: out_i = sum_k weights[k] * x_{i + k - c},
/// c = weights.size() / 2. Never materialised as a matrix.
struct Stencil {
    std::vector<double> weights{0.0};
    Boundary boundary = Boundary::Reflect;

    void validate() const
    {
        if (weights.empty() || weights.size() % 2 == 0) {
            throw std::invalid_argument("Stencil: need an odd, nonzero number of weights");
        }
        for (double w : weights) {
            if (!std::isfinite(w)) throw std::invalid_argument("Stencil: non-finite weight");
        }
    }

    [[nodiscard]] std::vector<double> apply(std::span<const double> x) const
    {
        const auto n = static_cast<std::ptrdiff_t>(x.size());
        const auto c = static_cast<std::ptrdiff_t>(weights.size() / 2);
        std::vector<double> out(x.size(), 0.0);
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(weights.size()); ++k) {
                std::ptrdiff_t j = i + k - c;
                if (j < 0 || j >= n) {
                    if (boundary == Boundary::Zero) continue;
                    // Mirror repeatedly until inside (only matters for wide stencils on short signals).
                    while (j < 0 || j >= n) j = j < 0 ? -j - 1 : 2 * n - j - 1;
                }
                acc += weights[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
            }
            out[static_cast<std::size_t>(i)] = acc;
        }
        return out;
    }
};

using ScalarMap = std::function<double(double)>;

/// u = sigma2( f + W2 sigma1(W1 f + b1) + b2 ).
/// Empty biases mean zero.
struct ResidualBlock {
    Stencil w1;
    std::vector<double> b1;
    ScalarMap sigma1 = [](double) { return 0.0; };
    Stencil w2;
    std::vector<double> b2;
    ScalarMap sigma2 = [](double x) { return x; };
};

[[nodiscard]] inline Signal1D apply_block(const ResidualBlock& block, const Signal1D& f)
{
    block.w1.validate();
    block.w2.validate();
    const std::size_t n = f.size();
    if ((!block.b1.empty() && block.b1.size() != n) || (!block.b2.empty() && block.b2.size() != n)) {
        throw std::invalid_argument("apply_block: bias length does not match the signal");
    }
    if (!block.sigma1 || !block.sigma2) throw std::invalid_argument("apply_block: missing activation");

    std::vector<double> inner = block.w1.apply(f.values());
    for (std::size_t i = 0; i < n; ++i) {
        if (!block.b1.empty()) inner[i] += block.b1[i];
        inner[i] = block.sigma1(inner[i]);
    }
    const std::vector<double> branch = block.w2.apply(inner);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = f[i] + branch[i];
        if (!block.b2.empty()) v += block.b2[i];
        out[i] = block.sigma2(v);
    }
    return f.with_values(std::move(out));
}

/// The residual block that performs one explicit diffusion step:
/// sigma1 = Phi, sigma2 = Id, W1 = (1/h)[0, -1, 1], W2 = (tau/h)[-1, 1, 0], no biases.
/// tau = 0 gives the identity block.
[[nodiscard]] inline ResidualBlock make_diffusion_block(const RoleFunction& phi, double tau, double h)
{
    if (phi.role() != Role::Activation) {
        throw std::invalid_argument("make_diffusion_block: expected an activation function");
    }
    if (!std::isfinite(tau) || tau < 0.0 || !std::isfinite(h) || h <= 0.0) {
        throw std::invalid_argument("make_diffusion_block: need tau >= 0 and h > 0");
    }
    ResidualBlock block;
    block.w1 = Stencil{{0.0, -1.0 / h, 1.0 / h}, Boundary::Reflect};
    block.sigma1 = phi.evaluator();
    block.w2 = Stencil{{-tau / h, tau / h, 0.0}, Boundary::Zero};
    block.sigma2 = [](double x) { return x; };
    return block;
}

[[nodiscard]] inline Signal1D chain(std::span<const ResidualBlock> blocks, const Signal1D& f)
{
    Signal1D u = f;
    for (const auto& b : blocks) u = apply_block(b, u);
    return u;
}

/// Applies the same block `depth` times without storing copies of it.
[[nodiscard]] inline Signal1D chain_repeated(const ResidualBlock& block, std::size_t depth, const Signal1D& f)
{
    Signal1D u = f;
    for (std::size_t k = 0; k < depth; ++k) u = apply_block(block, u);
    return u;
}

[[nodiscard]] constexpr double relu(double r) noexcept { return r > 0.0 ? r : 0.0; }

/// Truncated-TV activation written with two ReLUs:
/// r - ReLU(r - sqrt2 theta) + ReLU(-r - sqrt2 theta).
[[nodiscard]] inline double truncated_tv_via_relu(double theta, double r)
{
    if (!(theta > 0.0)) throw std::invalid_argument("truncated_tv_via_relu: theta must be positive");
    const double knee = std::numbers::sqrt2 * theta;
    return r - relu(r - knee) + relu(-r - knee);
}

} // namespace diffnet
