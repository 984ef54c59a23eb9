#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace diffnet {

/// A finite sampled 1D signal on an equidistant grid with spacing h.
///
/// Samples are always finite and there is always at least one of them.
/// Boundaries are reflecting: the sample outside either end is taken to be
/// equal to the end sample, so boundary differences vanish.
class Signal1D {
public:
    explicit Signal1D(std::vector<double> values, double h = 1.0)
        : values_(std::move(values)), h_(h)
    {
        if (values_.empty()) {
            throw std::invalid_argument("Signal1D: at least one sample required");
        }
        if (!std::isfinite(h_) || h_ <= 0.0) {
            throw std::invalid_argument("Signal1D: grid size must be finite and positive");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw std::invalid_argument("Signal1D: non-finite sample at index " + std::to_string(i));
            }
        }
    }

    Signal1D(std::initializer_list<double> values, double h = 1.0)
        : Signal1D(std::vector<double>(values), h)
    {
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double h() const noexcept { return h_; }
    [[nodiscard]] std::span<const double> values() const& noexcept { return values_; }
    // A span into a temporary would dangle.
    std::span<const double> values() const&& = delete;
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    /// New signal on the same grid.
    [[nodiscard]] Signal1D with_values(std::vector<double> values) const
    {
        return Signal1D(std::move(values), h_);
    }

    [[nodiscard]] std::vector<double> to_vector() const { return values_; }

private:
    std::vector<double> values_;
    double h_;
};

/// v_i = (u_{i+1} - u_i) / h, with u_{N+1} := u_N so the last entry is zero.
[[nodiscard]] inline Signal1D forward_diff(const Signal1D& u)
{
    const auto x = u.values();
    const std::size_t n = x.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        v[i] = (x[i + 1] - x[i]) / u.h();
    }
    return u.with_values(std::move(v));
}

/// v_i = (u_i - u_{i-1}) / h, with u_0 := u_1 so the first entry is zero.
[[nodiscard]] inline Signal1D backward_diff(const Signal1D& u)
{
    const auto x = u.values();
    const std::size_t n = x.size();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        v[i] = (x[i] - x[i - 1]) / u.h();
    }
    return u.with_values(std::move(v));
}

/// Backward difference of a staggered flux field.
///
/// flux[i] is the flux between samples i and i+1. The flux through the left
/// boundary is zero, which is what the reflecting condition u_0 := u_1 implies
/// for Phi(D+ u). Together with the zero last entry of forward_diff this makes
/// the sum of the result telescope to zero.
[[nodiscard]] inline std::vector<double> flux_divergence(std::span<const double> flux, double h)
{
    const std::size_t n = flux.size();
    std::vector<double> v(n);
    double left = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = (flux[i] - left) / h;
        left = flux[i];
    }
    return v;
}

[[nodiscard]] inline double min_value(const Signal1D& u)
{
    double m = u[0];
    for (double x : u.values()) m = std::min(m, x);
    return m;
}

[[nodiscard]] inline double max_value(const Signal1D& u)
{
    double m = u[0];
    for (double x : u.values()) m = std::max(m, x);
    return m;
}

[[nodiscard]] inline double mean_value(const Signal1D& u)
{
    double s = 0.0;
    for (double x : u.values()) s += x;
    return s / static_cast<double>(u.size());
}

[[nodiscard]] inline double max_abs_diff(const Signal1D& a, const Signal1D& b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("max_abs_diff: length mismatch");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace diffnet
