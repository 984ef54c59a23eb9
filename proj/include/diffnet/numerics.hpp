#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

// Quadrature and differentiation used by the nonlinearity translations.
// Breakpoints are given as nonnegative magnitudes b; the kinks sit at +b and -b.

namespace diffnet::numerics {

inline constexpr int kSimpsonPanels = 1024;

/// Composite Simpson rule on [a, b] (b < a allowed, gives the signed integral).
/// With one_sided_ends the end values are taken a relative 1e-12 inside the
/// interval, i.e. as one-sided limits, for integrands that jump at a or b.
template <class F>
[[nodiscard]] double simpson(const F& f, double a, double b, int panels = kSimpsonPanels,
                             bool one_sided_ends = false)
{
    if (panels < 2 || panels % 2 != 0) {
        throw std::invalid_argument("simpson: panel count must be even and >= 2");
    }
    if (a == b) return 0.0;
    const double step = (b - a) / panels;
    double odd = 0.0;
    double even = 0.0;
    for (int k = 1; k < panels; ++k) {
        const double x = a + k * step;
        if (k % 2 == 1) {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    const double nudge = one_sided_ends ? 1e-12 * (b - a) : 0.0;
    return step / 3.0 * (f(a + nudge) + 4.0 * odd + 2.0 * even + f(b - nudge));
}

/// Integral of f over [0, r], split at every breakpoint strictly inside.
/// Each piece gets its own composite Simpson rule so kinks and jumps of f
/// never fall inside a panel.
template <class F>
[[nodiscard]] double integrate_from_zero(const F& f, double r, std::span<const double> breakpoints)
{
    if (r == 0.0) return 0.0;
    const double sign = r > 0.0 ? 1.0 : -1.0;
    const double end = std::abs(r);
    std::vector<double> cuts;
    for (double b : breakpoints) {
        if (b > 0.0 && b < end) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(end);

    double total = 0.0;
    double lo = 0.0;
    for (double hi : cuts) {
        total += simpson(f, sign * lo, sign * hi, kSimpsonPanels, true);
        lo = hi;
    }
    return total;
}

[[nodiscard]] inline double derivative_step(double r)
{
    return std::max(1e-6, 1e-6 * std::abs(r));
}

/// Numeric first derivative: central difference with step max(1e-6, 1e-6|r|).
///
/// If a breakpoint lies within one step of r, a second-order one-sided
/// difference is taken on the side away from it. At a breakpoint itself the
/// inner side (towards zero) is used, matching the "<=" inner branches of the
/// piecewise families.
template <class F>
[[nodiscard]] double derivative(const F& f, double r, std::span<const double> breakpoints = {})
{
    const double d = derivative_step(r);
    for (double b : breakpoints) {
        for (double p : {b, -b}) {
            if (std::abs(r - p) >= d) continue;
            bool backward = r < p;
            if (r == p) backward = p > 0.0;
            if (backward) {
                return (3.0 * f(r) - 4.0 * f(r - d) + f(r - 2.0 * d)) / (2.0 * d);
            }
            return (-3.0 * f(r) + 4.0 * f(r + d) - f(r + 2.0 * d)) / (2.0 * d);
        }
    }
    return (f(r + d) - f(r - d)) / (2.0 * d);
}

} // namespace diffnet::numerics
