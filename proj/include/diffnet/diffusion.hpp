#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonlinearity.hpp"
#include "signal.hpp"

namespace diffnet {

/// Which stability notion a step size has to guarantee.
/// MaxMin: tau <= h^2 / (2L) (maximum-minimum principle).
/// SignStable: tau <= h^2 / (4L), which additionally never adds sign changes.
enum class StabilityMode { MaxMin, SignStable };

class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, std::size_t min_steps)
        : std::runtime_error(what), min_steps_(min_steps)
    {
    }
    /// Smallest step count that would have satisfied the bound.
    [[nodiscard]] std::size_t min_steps() const noexcept { return min_steps_; }

private:
    std::size_t min_steps_;
};

struct DiffusionPlan {
    RoleFunction phi;
    double tau = 0.0;
    std::size_t steps = 0;
    double h = 1.0;
    double stopping_time = 0.0;
    StabilityMode mode = StabilityMode::SignStable;
    double lipschitz = 0.0;
};

/// One explicit step u + tau * D-(Phi(D+ u)) with reflecting boundaries:
///   u_i <- u_i + (tau/h) (Phi((u_{i+1}-u_i)/h) - Phi((u_i-u_{i-1})/h)).
[[nodiscard]] inline Signal1D explicit_step(const Signal1D& u, const RoleFunction& phi, double tau)
{
    if (phi.role() != Role::Activation) {
        throw std::invalid_argument("explicit_step: expected an activation (flux) function");
    }
    if (!std::isfinite(tau) || tau <= 0.0) {
        throw std::invalid_argument("explicit_step: tau must be finite and positive");
    }
    const Signal1D grad = forward_diff(u);
    std::vector<double> flux(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) flux[i] = phi(grad[i]);
    const std::vector<double> div = flux_divergence(flux, u.h());

    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) next[i] = u[i] + tau * div[i];
    return u.with_values(std::move(next));
}

[[nodiscard]] inline double max_stable_tau(double lipschitz, double h, StabilityMode mode)
{
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz)) {
        throw std::invalid_argument("max_stable_tau: Lipschitz constant must be finite and positive");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("max_stable_tau: h must be finite and positive");
    }
    const double denom = mode == StabilityMode::MaxMin ? 2.0 : 4.0;
    return h * h / (denom * lipschitz);
}

inline constexpr std::size_t kLipschitzSamples = 20001;

/// Lipschitz constant of phi on the gradient range relevant to f: twice the
/// largest |D+ f|. Under a stable step the gradients never leave the range
/// of the initial ones, so this covers the whole evolution.
/// A constant f has no gradient range; [-1, 1] is used instead.
[[nodiscard]] inline double local_lipschitz(const Signal1D& f, const RoleFunction& phi)
{
    double g = 0.0;
    const Signal1D grad = forward_diff(f);
    for (double d : grad.values()) g = std::max(g, std::abs(d));
    const double r_max = g > 0.0 ? 2.0 * g : 1.0;
    return estimate_lipschitz(phi, r_max, kLipschitzSamples);
}

/// Smallest m with T/m inside the bound. The relative slack of 1e-12 keeps a
/// T that sits exactly on a multiple of the bound from rounding up.
[[nodiscard]] inline std::size_t steps_for(double stopping_time, double tau_max)
{
    if (stopping_time <= 0.0) return 0;
    const double ratio = stopping_time / tau_max;
    return static_cast<std::size_t>(std::max(1.0, std::ceil(ratio * (1.0 - 1e-12))));
}

struct DiffusionResult {
    Signal1D signal;
    DiffusionPlan plan;
};

/// Diffuse f up to time T with m uniform explicit steps, m chosen as the
/// smallest count whose step size T/m satisfies the bound of `mode`.
[[nodiscard]] inline DiffusionResult diffuse(const Signal1D& f, const RoleFunction& phi, double stopping_time,
                                             StabilityMode mode = StabilityMode::SignStable)
{
    if (!std::isfinite(stopping_time) || stopping_time < 0.0) {
        throw std::invalid_argument("diffuse: stopping time must be finite and nonnegative");
    }
    if (phi.role() != Role::Activation) {
        throw std::invalid_argument("diffuse: expected an activation (flux) function");
    }
    DiffusionPlan plan{phi, 0.0, 0, f.h(), stopping_time, mode, 0.0};
    if (stopping_time == 0.0) return {f, plan};

    plan.lipschitz = local_lipschitz(f, phi);
    if (plan.lipschitz == 0.0) {
        // phi vanishes on the whole relevant range: nothing moves.
        plan.steps = 1;
    } else {
        plan.steps = steps_for(stopping_time, max_stable_tau(plan.lipschitz, f.h(), mode));
    }
    plan.tau = stopping_time / static_cast<double>(plan.steps);

    Signal1D u = f;
    for (std::size_t k = 0; k < plan.steps; ++k) u = explicit_step(u, phi, plan.tau);
    return {u, plan};
}

/// m explicit steps with a fixed tau; no bound check.
[[nodiscard]] inline Signal1D diffuse_steps(const Signal1D& f, const RoleFunction& phi, double tau,
                                            std::size_t steps)
{
    Signal1D u = f;
    for (std::size_t k = 0; k < steps; ++k) u = explicit_step(u, phi, tau);
    return u;
}

} // namespace diffnet
