#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "diffusion.hpp"
#include "nonlinearity.hpp"
#include "signal.hpp"

namespace diffnet {

/// Quadratic data term plus alpha times a regulariser of the derivative.
class EnergySpec {
public:
    EnergySpec(RoleFunction psi, double alpha) : psi_(std::move(psi)), alpha_(alpha)
    {
        if (psi_.role() != Role::Regulariser) {
            throw std::invalid_argument("EnergySpec: expected a regulariser");
        }
        if (!std::isfinite(alpha_) || alpha_ <= 0.0) {
            throw std::invalid_argument("EnergySpec: alpha must be finite and positive");
        }
        if (std::abs(psi_(0.0)) > 1e-12) {
            throw std::invalid_argument("EnergySpec: regulariser must satisfy Psi(0) = 0");
        }
    }

    [[nodiscard]] const RoleFunction& psi() const noexcept { return psi_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

private:
    RoleFunction psi_;
    double alpha_;
};

namespace detail {
inline void require_same_grid(const Signal1D& u, const Signal1D& f, const char* who)
{
    if (u.size() != f.size() || u.h() != f.h()) {
        throw std::invalid_argument(std::string(who) + ": signals differ in length or grid size");
    }
}

// D-( Psi'(D+ u) / 2 ) with zero boundary flux.
inline std::vector<double> half_flux_divergence(const Signal1D& u, const RoleFunction& psi)
{
    const Signal1D grad = forward_diff(u);
    std::vector<double> flux(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) flux[i] = psi.derivative(grad[i]) / 2.0;
    return flux_divergence(flux, u.h());
}
} // namespace detail

/// E(u) = h sum (u_i - f_i)^2 + alpha h sum Psi((D+ u)_i); the last difference is zero.
[[nodiscard]] inline double discrete_energy(const Signal1D& u, const Signal1D& f, const EnergySpec& spec)
{
    detail::require_same_grid(u, f, "discrete_energy");
    const Signal1D grad = forward_diff(u);
    double data = 0.0;
    double reg = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - f[i];
        data += d * d;
        reg += spec.psi()(grad[i]);
    }
    return u.h() * (data + spec.alpha() * reg);
}

/// Gradient of discrete_energy with respect to u:
/// 2h [ (u - f) - alpha D-( Psi'(D+ u)/2 ) ].
[[nodiscard]] inline std::vector<double> energy_gradient(const Signal1D& u, const Signal1D& f,
                                                         const EnergySpec& spec)
{
    detail::require_same_grid(u, f, "energy_gradient");
    const std::vector<double> div = detail::half_flux_divergence(u, spec.psi());
    std::vector<double> g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        g[i] = 2.0 * u.h() * ((u[i] - f[i]) - spec.alpha() * div[i]);
    }
    return g;
}

/// r_i = (u_i - f_i)/alpha - D-( Psi'(D+ u)/2 )_i. Zero at a minimiser.
[[nodiscard]] inline Signal1D euler_lagrange_residual(const Signal1D& u, const Signal1D& f, const EnergySpec& spec)
{
    detail::require_same_grid(u, f, "euler_lagrange_residual");
    const std::vector<double> div = detail::half_flux_divergence(u, spec.psi());
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = (u[i] - f[i]) / spec.alpha() - div[i];
    return u.with_values(std::move(r));
}

/// Approximates the minimiser by m explicit diffusion steps of size alpha/m
/// with flux Phi = Psi'/2. Throws StabilityError if alpha/m exceeds the
/// maximum-minimum bound h^2/(2L).
[[nodiscard]] inline Signal1D minimize_by_diffusion(const Signal1D& f, const EnergySpec& spec, std::size_t steps)
{
    if (steps < 1) throw std::invalid_argument("minimize_by_diffusion: need at least one step");
    const RoleFunction phi = translate(spec.psi(), Role::Activation, CouplingParams{std::nullopt, spec.alpha(), f.h()});
    const double tau = spec.alpha() / static_cast<double>(steps);
    const double lip = local_lipschitz(f, phi);
    if (lip > 0.0) {
        const double tau_max = max_stable_tau(lip, f.h(), StabilityMode::MaxMin);
        if (tau > tau_max * (1.0 + 1e-12)) {
            const std::size_t min_m = steps_for(spec.alpha(), tau_max);
            throw StabilityError("minimize_by_diffusion: tau = alpha/m = " + std::to_string(tau) +
                                     " exceeds the stability bound " + std::to_string(tau_max) +
                                     "; use at least m = " + std::to_string(min_m),
                                 min_m);
        }
    }
    return diffuse_steps(f, phi, tau, steps);
}

/// Direct solve of the Whittaker-Tikhonov Euler-Lagrange system
///   (u - f)/alpha = Lap u,  Lap the reflecting-boundary second difference,
/// i.e. (I - alpha Lap) u = f, by the Thomas algorithm.
[[nodiscard]] inline Signal1D tikhonov_solve_oracle(const Signal1D& f, double alpha)
{
    if (!std::isfinite(alpha) || alpha <= 0.0) {
        throw std::invalid_argument("tikhonov_solve_oracle: alpha must be finite and positive");
    }
    const std::size_t n = f.size();
    const double k = alpha / (f.h() * f.h());
    std::vector<double> lower(n, 0.0);
    std::vector<double> diag(n, 1.0);
    std::vector<double> upper(n, 0.0);
    std::vector<double> rhs = f.to_vector();
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) {
            lower[i] = -k;
            diag[i] += k;
        }
        if (i + 1 < n) {
            upper[i] = -k;
            diag[i] += k;
        }
    }
    // Forward elimination; the matrix is strictly diagonally dominant.
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> u(n);
    u[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
    }
    return f.with_values(std::move(u));
}

} // namespace diffnet
