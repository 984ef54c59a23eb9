#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffusion.hpp"
#include "nonlinearity.hpp"
#include "signal.hpp"

namespace diffnet {

/// Sign alternations among the nonzero samples (zeros are dropped first).
[[nodiscard]] inline std::size_t count_sign_changes(const Signal1D& u)
{
    std::size_t changes = 0;
    int last = 0;
    for (double x : u.values()) {
        const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

struct RangeCheck {
    bool ok = true;
    double worst_overshoot = 0.0;  // largest distance outside [min f, max f], 0 if none
};

/// Whether every state stays inside [min f - slack, max f + slack].
[[nodiscard]] inline RangeCheck check_range_preservation(const Signal1D& f, std::span<const Signal1D> trajectory,
                                                         double slack = 1e-12)
{
    if (trajectory.empty()) throw std::invalid_argument("check_range_preservation: empty trajectory");
    const double lo = min_value(f);
    const double hi = max_value(f);
    RangeCheck result;
    for (const Signal1D& u : trajectory) {
        if (u.size() != f.size()) throw std::invalid_argument("check_range_preservation: length mismatch");
        for (double x : u.values()) {
            const double over = std::max(lo - x, x - hi);
            if (over > 0.0) result.worst_overshoot = std::max(result.worst_overshoot, over);
            if (over > slack) result.ok = false;
        }
    }
    return result;
}

struct RangeViolation {
    std::size_t step = 0;    // 1-based step after which the sample left the range
    std::size_t index = 0;
    double value = 0.0;
};

struct StabilityReport {
    double lipschitz = 0.0;
    double tau = 0.0;
    double tau_maxmin = 0.0;
    double tau_sign = 0.0;  // always tau_maxmin / 2
    std::size_t steps = 0;
    bool range_ok = true;
    double worst_overshoot = 0.0;
    std::vector<std::size_t> sign_changes;  // entry k: count after k steps; entry 0 is the input
    std::size_t sign_increases = 0;         // steps whose count exceeds the previous one
    bool sign_stable_overall = true;        // final count <= input count
    std::vector<RangeViolation> violations;

    [[nodiscard]] bool sign_stable_per_step() const noexcept { return sign_increases == 0; }
};

inline constexpr double kDefaultSlack = 1e-12;

/// Runs `steps` explicit steps of size tau from f and records range and
/// sign-change diagnostics after every step.
[[nodiscard]] inline StabilityReport analyze(const Signal1D& f, const RoleFunction& phi, double tau, std::size_t steps,
                                             double slack = kDefaultSlack)
{
    if (steps < 1) throw std::invalid_argument("analyze: need at least one step");
    StabilityReport rep;
    rep.lipschitz = local_lipschitz(f, phi);
    if (rep.lipschitz > 0.0) {
        rep.tau_maxmin = max_stable_tau(rep.lipschitz, f.h(), StabilityMode::MaxMin);
        rep.tau_sign = rep.tau_maxmin / 2.0;
    } else {
        rep.tau_maxmin = rep.tau_sign = std::numeric_limits<double>::infinity();
    }
    rep.tau = tau;
    rep.steps = steps;

    const double lo = min_value(f);
    const double hi = max_value(f);
    rep.sign_changes.push_back(count_sign_changes(f));
    Signal1D u = f;
    for (std::size_t k = 1; k <= steps; ++k) {
        u = explicit_step(u, phi, tau);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double over = std::max(lo - u[i], u[i] - hi);
            if (over > 0.0) rep.worst_overshoot = std::max(rep.worst_overshoot, over);
            if (over > slack) {
                rep.range_ok = false;
                rep.violations.push_back({k, i, u[i]});
            }
        }
        const std::size_t c = count_sign_changes(u);
        if (c > rep.sign_changes.back()) ++rep.sign_increases;
        rep.sign_changes.push_back(c);
    }
    rep.sign_stable_overall = rep.sign_changes.back() <= rep.sign_changes.front();
    return rep;
}

namespace detail {
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
} // namespace detail

/// Flat key=value lines, one per field. Violations are listed as
/// violation.<n>=<step>,<index>,<value>, at most `max_violations` of them.
[[nodiscard]] inline std::string to_key_value(const StabilityReport& rep, std::size_t max_violations = 100)
{
    using detail::format_double;
    std::ostringstream os;
    os << "lipschitz=" << format_double(rep.lipschitz) << '\n';
    os << "tau=" << format_double(rep.tau) << '\n';
    os << "tau_maxmin=" << format_double(rep.tau_maxmin) << '\n';
    os << "tau_sign=" << format_double(rep.tau_sign) << '\n';
    os << "steps=" << rep.steps << '\n';
    os << "range_ok=" << (rep.range_ok ? "true" : "false") << '\n';
    os << "worst_overshoot=" << format_double(rep.worst_overshoot) << '\n';
    os << "sign_changes_in=" << (rep.sign_changes.empty() ? 0 : rep.sign_changes.front()) << '\n';
    os << "sign_changes_out=" << (rep.sign_changes.empty() ? 0 : rep.sign_changes.back()) << '\n';
    os << "sign_increases=" << rep.sign_increases << '\n';
    os << "sign_stable_per_step=" << (rep.sign_stable_per_step() ? "true" : "false") << '\n';
    os << "sign_stable_overall=" << (rep.sign_stable_overall ? "true" : "false") << '\n';
    os << "violations=" << rep.violations.size() << '\n';
    for (std::size_t k = 0; k < rep.violations.size() && k < max_violations; ++k) {
        const auto& v = rep.violations[k];
        os << "violation." << k << '=' << v.step << ',' << v.index << ',' << format_double(v.value) << '\n';
    }
    return os.str();
}

} // namespace diffnet
