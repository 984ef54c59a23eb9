#pragma once

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nonlinearity.hpp"
#include "signal.hpp"

namespace diffnet {

/// Single-scale Haar coefficients of an adjacent sample pair (a, b).
struct HaarPair {
    double scaling = 0.0;  // (a + b) / sqrt(2)
    double wavelet = 0.0;  // (b - a) / sqrt(2)

    [[nodiscard]] static HaarPair analyse(double a, double b) noexcept
    {
        constexpr double inv = 1.0 / std::numbers::sqrt2;
        return {(a + b) * inv, (b - a) * inv};
    }

    [[nodiscard]] std::pair<double, double> synthesise() const noexcept
    {
        constexpr double inv = 1.0 / std::numbers::sqrt2;
        return {(scaling - wavelet) * inv, (scaling + wavelet) * inv};
    }
};

namespace detail {
inline void require_shrinkage(const RoleFunction& s, const char* who)
{
    if (s.role() != Role::Shrinkage) {
        throw std::invalid_argument(std::string(who) + ": expected a shrinkage function");
    }
}
inline void require_unit_grid(const Signal1D& u, const char* who)
{
    if (u.h() != 1.0) {
        throw std::invalid_argument(std::string(who) + ": shift-invariant Haar shrinkage requires h = 1");
    }
}
} // namespace detail

/// Analysis, shrinkage of the wavelet coefficient, synthesis.
[[nodiscard]] inline std::pair<double, double> shrink_pair(double a, double b, const RoleFunction& s)
{
    HaarPair p = HaarPair::analyse(a, b);
    p.wavelet = s(p.wavelet);
    return p.synthesise();
}

/// One step of shift-invariant Haar shrinkage (closed form):
///   u_i' = u_i + (u_{i+1} - 2u_i + u_{i-1})/4
///              + (S((u_i - u_{i-1})/sqrt2) - S((u_{i+1} - u_i)/sqrt2)) / (2 sqrt2)
/// with reflecting boundaries. Requires h = 1.
[[nodiscard]] inline Signal1D shift_invariant_step(const Signal1D& u, const RoleFunction& s)
{
    detail::require_shrinkage(s, "shift_invariant_step");
    detail::require_unit_grid(u, "shift_invariant_step");
    constexpr double r2 = std::numbers::sqrt2;
    const std::size_t n = u.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? u[i - 1] : u[i];
        const double right = i + 1 < n ? u[i + 1] : u[i];
        const double back = u[i] - left;
        const double fwd = right - u[i];
        out[i] = u[i] + (fwd - back) / 4.0 + (s(back / r2) - s(fwd / r2)) / (2.0 * r2);
    }
    return u.with_values(std::move(out));
}

/// The same step computed the long way: shrink both pair decompositions
/// (pairs starting at even and at odd positions, with reflected phantom pairs
/// at the ends) and average the two reconstructions of every sample.
[[nodiscard]] inline Signal1D shift_invariant_step_by_pairs(const Signal1D& u, const RoleFunction& s)
{
    detail::require_shrinkage(s, "shift_invariant_step_by_pairs");
    detail::require_unit_grid(u, "shift_invariant_step_by_pairs");
    const std::size_t n = u.size();
    // Every sample i is the right member of pair (i-1, i) and the left
    // member of pair (i, i+1); index -1 and n are reflected copies.
    std::vector<double> as_right(n);
    std::vector<double> as_left(n);
    for (std::size_t i = 0; i <= n; ++i) {
        const double a = i > 0 ? u[i - 1] : u[0];
        const double b = i < n ? u[i] : u[n - 1];
        const auto [a2, b2] = shrink_pair(a, b, s);
        if (i > 0) as_left[i - 1] = a2;
        if (i < n) as_right[i] = b2;
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (as_left[i] + as_right[i]);
    return u.with_values(std::move(out));
}

[[nodiscard]] inline Signal1D iterate_shrinkage(const Signal1D& f, const RoleFunction& s, std::size_t steps)
{
    detail::require_shrinkage(s, "iterate_shrinkage");
    detail::require_unit_grid(f, "iterate_shrinkage");
    Signal1D u = f;
    for (std::size_t k = 0; k < steps; ++k) u = shift_invariant_step(u, s);
    return u;
}

} // namespace diffnet
