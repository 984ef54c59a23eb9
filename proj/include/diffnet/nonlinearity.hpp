#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "numerics.hpp"

namespace diffnet {

/// The four roles a scalar nonlinearity can play: diffusivity g,
/// regulariser Psi, wavelet shrinkage S and activation (flux) Phi.
enum class Role { Diffusivity, Regulariser, Shrinkage, Activation };

inline constexpr Role kAllRoles[] = {Role::Diffusivity, Role::Regulariser, Role::Shrinkage, Role::Activation};

enum class Family { Constant, Charbonnier, TruncatedTV, PeronaMalik, TruncatedBFB, TruncatedQuadratic };

inline constexpr Family kAllFamilies[] = {Family::Constant,    Family::Charbonnier,  Family::TruncatedTV,
                                          Family::PeronaMalik, Family::TruncatedBFB, Family::TruncatedQuadratic};

[[nodiscard]] inline std::string_view to_string(Role role)
{
    switch (role) {
    case Role::Diffusivity: return "diffusivity";
    case Role::Regulariser: return "regulariser";
    case Role::Shrinkage: return "shrinkage";
    case Role::Activation: return "activation";
    }
    return "?";
}

[[nodiscard]] inline std::string_view to_string(Family family)
{
    switch (family) {
    case Family::Constant: return "constant";
    case Family::Charbonnier: return "charbonnier";
    case Family::TruncatedTV: return "truncated-tv";
    case Family::PeronaMalik: return "perona-malik";
    case Family::TruncatedBFB: return "truncated-bfb";
    case Family::TruncatedQuadratic: return "truncated-quadratic";
    }
    return "?";
}

[[nodiscard]] inline std::optional<Role> parse_role(std::string_view name)
{
    for (Role r : kAllRoles) {
        if (to_string(r) == name) return r;
    }
    if (name == "regularizer") return Role::Regulariser;
    if (name == "flux") return Role::Activation;
    return std::nullopt;
}

[[nodiscard]] inline std::optional<Family> parse_family(std::string_view name)
{
    for (Family f : kAllFamilies) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

/// A closed-form family together with its parameter.
///
/// Charbonnier and Perona-Malik use the contrast lambda; the truncated
/// families use the threshold theta. The unused parameter is ignored.
struct FamilySpec {
    Family family = Family::Constant;
    double contrast = 1.0;
    double threshold = 1.0;

    [[nodiscard]] bool uses_contrast() const noexcept
    {
        return family == Family::Charbonnier || family == Family::PeronaMalik;
    }
    [[nodiscard]] bool uses_threshold() const noexcept
    {
        return family == Family::TruncatedTV || family == Family::TruncatedBFB ||
               family == Family::TruncatedQuadratic;
    }

    void validate() const
    {
        auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (uses_contrast() && !ok(contrast)) {
            throw std::invalid_argument("FamilySpec: contrast lambda must be finite and positive");
        }
        if (uses_threshold() && !ok(threshold)) {
            throw std::invalid_argument("FamilySpec: threshold theta must be finite and positive");
        }
    }

    [[nodiscard]] std::string describe() const
    {
        std::string s(to_string(family));
        if (uses_contrast()) s += "(lambda=" + std::to_string(contrast) + ")";
        if (uses_threshold()) s += "(theta=" + std::to_string(threshold) + ")";
        return s;
    }
};

/// Step size tau, regularisation weight alpha and grid size h.
///
/// tau and alpha are optional: a translation that needs one of them and
/// does not find it is an error. Wherever a chain of translations touches
/// both, they must be equal (both play the role of a diffusion time).
struct CouplingParams {
    std::optional<double> tau;
    std::optional<double> alpha;
    double h = 1.0;

    [[nodiscard]] static CouplingParams standard() { return {0.25, 0.25, 1.0}; }

    void validate() const
    {
        auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (tau && !ok(*tau)) throw std::invalid_argument("CouplingParams: tau must be finite and positive");
        if (alpha && !ok(*alpha)) throw std::invalid_argument("CouplingParams: alpha must be finite and positive");
        if (!ok(h)) throw std::invalid_argument("CouplingParams: h must be finite and positive");
    }
};

struct ClosedForm {
    FamilySpec spec;
};

/// A function obtained from another by one or more dictionary cells.
struct Translated {
    std::string origin;               // description of the untranslated source
    std::vector<Role> chain;          // roles visited, source role first
    std::optional<double> time_constant;  // the tau/alpha value used so far, if any
};

struct UserSupplied {
    std::string label;
};

using Provenance = std::variant<ClosedForm, Translated, UserSupplied>;

/// A scalar nonlinearity tagged with the role it plays.
///
/// Cheap to copy; the evaluator is shared and immutable, so a RoleFunction
/// can be evaluated concurrently.
class RoleFunction {
public:
    using Evaluator = std::function<double(double)>;

    RoleFunction(Role role, Evaluator eval, Provenance provenance, std::vector<double> breakpoints = {},
                 Evaluator derivative = {})
        : data_(std::make_shared<Data>(Data{role, std::move(eval), std::move(derivative), std::move(provenance),
                                            std::move(breakpoints)}))
    {
        if (!data_->eval) throw std::invalid_argument("RoleFunction: empty evaluator");
        for (double& b : data_->breakpoints) b = std::abs(b);
    }

    /// Wrap an arbitrary callable. Breakpoints are the magnitudes of any kinks
    /// or jumps so quadrature and differentiation can avoid straddling them.
    [[nodiscard]] static RoleFunction user_supplied(Role role, Evaluator eval, std::string label = "user",
                                                    std::vector<double> breakpoints = {})
    {
        return RoleFunction(role, std::move(eval), UserSupplied{std::move(label)}, std::move(breakpoints));
    }

    [[nodiscard]] double operator()(double r) const { return data_->eval(r); }
    [[nodiscard]] Role role() const noexcept { return data_->role; }
    [[nodiscard]] const Provenance& provenance() const noexcept { return data_->provenance; }
    [[nodiscard]] std::span<const double> breakpoints() const noexcept { return data_->breakpoints; }
    [[nodiscard]] const Evaluator& evaluator() const noexcept { return data_->eval; }

    [[nodiscard]] bool has_analytic_derivative() const noexcept { return static_cast<bool>(data_->derivative); }

    /// Analytic derivative when one was supplied, otherwise the numeric one.
    [[nodiscard]] double derivative(double r) const
    {
        if (data_->derivative) return data_->derivative(r);
        return numerics::derivative(data_->eval, r, data_->breakpoints);
    }

    /// The same function with any analytic derivative dropped, so that
    /// derivative() falls back to numeric differentiation.
    [[nodiscard]] RoleFunction without_analytic_derivative() const
    {
        return RoleFunction(data_->role, data_->eval, data_->provenance, data_->breakpoints);
    }

    [[nodiscard]] std::string describe() const
    {
        return std::visit(
            [this](const auto& p) -> std::string {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, ClosedForm>) {
                    return p.spec.describe() + " " + std::string(to_string(role()));
                } else if constexpr (std::is_same_v<P, Translated>) {
                    std::string s = p.origin;
                    for (std::size_t i = 1; i < p.chain.size(); ++i) {
                        s += " -> " + std::string(to_string(p.chain[i]));
                    }
                    return s;
                } else {
                    return p.label + " " + std::string(to_string(role()));
                }
            },
            data_->provenance);
    }

private:
    struct Data {
        Role role;
        Evaluator eval;
        Evaluator derivative;
        Provenance provenance;
        std::vector<double> breakpoints;
    };
    std::shared_ptr<Data> data_;
};

namespace detail {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

inline double sgn(double r) { return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0); }

inline double eval_diffusivity(const FamilySpec& s, double r)
{
    const double lam = s.contrast;
    const double th = s.threshold;
    const double a = std::abs(r);
    switch (s.family) {
    case Family::Constant: return 1.0;
    case Family::Charbonnier: return 1.0 / std::sqrt(1.0 + r * r / (lam * lam));
    case Family::TruncatedTV: return a <= kSqrt2 * th ? 1.0 : kSqrt2 * th / a;
    case Family::PeronaMalik: return std::exp(-r * r / (2.0 * lam * lam));
    case Family::TruncatedBFB: return a <= kSqrt2 * th ? 1.0 : 2.0 * th * th / (r * r);
    case Family::TruncatedQuadratic: return a <= kSqrt2 * th ? 1.0 : 0.0;
    }
    return 0.0;
}

inline double eval_regulariser(const FamilySpec& s, double r)
{
    const double lam = s.contrast;
    const double th = s.threshold;
    const double a = std::abs(r);
    switch (s.family) {
    case Family::Constant: return r * r;
    case Family::Charbonnier: return 2.0 * lam * lam * std::sqrt(1.0 + r * r / (lam * lam)) - 2.0 * lam * lam;
    case Family::TruncatedTV: return a <= kSqrt2 * th ? r * r : 2.0 * th * (kSqrt2 * a - th);
    case Family::PeronaMalik: return 2.0 * lam * lam * (1.0 - std::exp(-r * r / (2.0 * lam * lam)));
    case Family::TruncatedBFB:
        return a <= kSqrt2 * th ? r * r : 2.0 * th * th * (std::log(r * r / (2.0 * th * th)) + 1.0);
    case Family::TruncatedQuadratic: return a <= kSqrt2 * th ? r * r : 2.0 * th * th;
    }
    return 0.0;
}

inline double eval_shrinkage(const FamilySpec& s, double r)
{
    const double lam = s.contrast;
    const double th = s.threshold;
    const double a = std::abs(r);
    switch (s.family) {
    case Family::Constant: return 0.0;
    case Family::Charbonnier: return r * (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * r * r / (lam * lam)));
    case Family::TruncatedTV: return a <= th ? 0.0 : r - th * sgn(r);
    case Family::PeronaMalik: return r * (1.0 - std::exp(-r * r / (lam * lam)));
    case Family::TruncatedBFB: return a <= th ? 0.0 : r - th * th / r;
    case Family::TruncatedQuadratic: return a <= th ? 0.0 : r;
    }
    return 0.0;
}

inline double eval_activation(const FamilySpec& s, double r)
{
    const double lam = s.contrast;
    const double th = s.threshold;
    const double a = std::abs(r);
    switch (s.family) {
    case Family::Constant: return r;
    case Family::Charbonnier: return r / std::sqrt(1.0 + r * r / (lam * lam));
    case Family::TruncatedTV: return a <= kSqrt2 * th ? r : kSqrt2 * th * sgn(r);
    case Family::PeronaMalik: return r * std::exp(-r * r / (2.0 * lam * lam));
    case Family::TruncatedBFB: return a <= kSqrt2 * th ? r : 2.0 * th * th / r;
    case Family::TruncatedQuadratic: return a <= kSqrt2 * th ? r : 0.0;
    }
    return 0.0;
}

inline std::vector<double> family_breakpoints(const FamilySpec& s, Role role)
{
    if (!s.uses_threshold()) return {};
    if (role == Role::Shrinkage) return {s.threshold};
    return {kSqrt2 * s.threshold};
}

inline std::vector<double> scale_breakpoints(std::span<const double> bps, double factor)
{
    std::vector<double> out;
    out.reserve(bps.size());
    for (double b : bps) out.push_back(b * factor);
    return out;
}

// Below this magnitude a quotient numerator(r)/r is replaced by its limit.
inline constexpr double kSingularRadius = 1e-8;

// Limit of numerator(r)/r at r = 0 for an odd numerator.
template <class F>
double odd_quotient_limit(const F& numerator, double step = 1e-6)
{
    return (numerator(step) - numerator(-step)) / (2.0 * step);
}

} // namespace detail

/// Closed-form value of the given role's formula for a family.
[[nodiscard]] inline double eval_family(const FamilySpec& spec, Role role, double r)
{
    switch (role) {
    case Role::Diffusivity: return detail::eval_diffusivity(spec, r);
    case Role::Regulariser: return detail::eval_regulariser(spec, r);
    case Role::Shrinkage: return detail::eval_shrinkage(spec, r);
    case Role::Activation: return detail::eval_activation(spec, r);
    }
    return 0.0;
}

/// The closed-form function of a family in a given role. Regularisers carry
/// their analytic derivative Psi' = 2 Phi.
[[nodiscard]] inline RoleFunction make_family_function(const FamilySpec& spec, Role role)
{
    spec.validate();
    RoleFunction::Evaluator deriv;
    if (role == Role::Regulariser) {
        deriv = [spec](double r) { return 2.0 * detail::eval_activation(spec, r); };
    }
    return RoleFunction(
        role, [spec, role](double r) { return eval_family(spec, role, r); }, ClosedForm{spec},
        detail::family_breakpoints(spec, role), std::move(deriv));
}

[[nodiscard]] inline RoleFunction identity_activation()
{
    return make_family_function(FamilySpec{Family::Constant}, Role::Activation);
}

namespace detail {

inline Translated extend_provenance(const RoleFunction& f, Role to)
{
    Translated t;
    if (const auto* prev = std::get_if<Translated>(&f.provenance())) {
        t = *prev;
    } else {
        t.origin = f.describe();
        t.chain = {f.role()};
    }
    t.chain.push_back(to);
    return t;
}

enum class Constant { Tau, Alpha };

inline double require_constant(const CouplingParams& c, Constant which, Translated& prov)
{
    const auto& value = which == Constant::Tau ? c.tau : c.alpha;
    const char* name = which == Constant::Tau ? "tau" : "alpha";
    if (!value) {
        throw std::invalid_argument(std::string("translate: this dictionary cell requires ") + name);
    }
    if (prov.time_constant && *prov.time_constant != *value) {
        throw std::invalid_argument(std::string("translate: ") + name +
                                    " differs from the tau/alpha already used in this translation chain");
    }
    prov.time_constant = *value;
    return *value;
}

} // namespace detail

/// Translate a nonlinearity into another role with the dictionary formulas.
///
/// Cells with an integral from 0 to r use composite Simpson quadrature, cells
/// with Psi' use f.derivative() (analytic for closed-form regularisers,
/// numeric otherwise). Quotients by r are replaced by their limit for
/// |r| < 1e-8. Translating to the same role returns f unchanged.
[[nodiscard]] inline RoleFunction translate(const RoleFunction& f, Role to,
                                            const CouplingParams& coupling = CouplingParams::standard())
{
    using detail::kSingularRadius;
    using detail::kSqrt2;
    coupling.validate();
    const Role from = f.role();
    if (from == to) return f;

    Translated prov = detail::extend_provenance(f, to);
    const auto bps = f.breakpoints();
    std::vector<double> same(bps.begin(), bps.end());

    auto make = [&](RoleFunction::Evaluator eval, std::vector<double> out_bps) {
        return RoleFunction(to, std::move(eval), prov, std::move(out_bps));
    };

    switch (from) {
    case Role::Diffusivity: {
        const RoleFunction g = f;
        if (to == Role::Regulariser) {
            return make(
                [g](double r) {
                    auto integrand = [&g](double x) { return g(x) * x; };
                    return 2.0 * numerics::integrate_from_zero(integrand, r, g.breakpoints());
                },
                same);
        }
        if (to == Role::Shrinkage) {
            const double tau = detail::require_constant(coupling, detail::Constant::Tau, prov);
            return make([g, tau](double r) { return r * (1.0 - 4.0 * tau * g(kSqrt2 * r)); },
                        detail::scale_breakpoints(bps, 1.0 / kSqrt2));
        }
        return make([g](double r) { return g(r) * r; }, same);
    }
    case Role::Regulariser: {
        const RoleFunction psi = f;
        if (to == Role::Diffusivity) {
            return make(
                [psi](double r) {
                    if (std::abs(r) < kSingularRadius) {
                        if (psi.has_analytic_derivative()) {
                            return detail::odd_quotient_limit([&psi](double x) { return psi.derivative(x) / 2.0; });
                        }
                        // Psi''(0)/2 by a symmetric second difference.
                        const double d = 1e-4;
                        return (psi(d) - 2.0 * psi(0.0) + psi(-d)) / (2.0 * d * d);
                    }
                    return psi.derivative(r) / (2.0 * r);
                },
                same);
        }
        if (to == Role::Shrinkage) {
            const double alpha = detail::require_constant(coupling, detail::Constant::Alpha, prov);
            return make([psi, alpha](double r) { return r - kSqrt2 * alpha * psi.derivative(kSqrt2 * r); },
                        detail::scale_breakpoints(bps, 1.0 / kSqrt2));
        }
        return make([psi](double r) { return psi.derivative(r) / 2.0; }, same);
    }
    case Role::Shrinkage: {
        const RoleFunction s = f;
        if (to == Role::Diffusivity) {
            const double tau = detail::require_constant(coupling, detail::Constant::Tau, prov);
            return make(
                [s, tau](double r) {
                    auto numerator = [&s](double x) { return kSqrt2 * s(x / kSqrt2); };
                    const double ratio = std::abs(r) < kSingularRadius ? detail::odd_quotient_limit(numerator)
                                                                       : numerator(r) / r;
                    return (1.0 - ratio) / (4.0 * tau);
                },
                detail::scale_breakpoints(bps, kSqrt2));
        }
        if (to == Role::Regulariser) {
            const double alpha = detail::require_constant(coupling, detail::Constant::Alpha, prov);
            auto inner = detail::scale_breakpoints(bps, kSqrt2);
            return make(
                [s, alpha, inner](double r) {
                    auto integrand = [&s](double x) { return s(x / kSqrt2); };
                    const double integral = numerics::integrate_from_zero(integrand, r, inner);
                    return (r * r - 2.0 * kSqrt2 * integral) / (4.0 * alpha);
                },
                detail::scale_breakpoints(bps, kSqrt2));
        }
        const double tau = detail::require_constant(coupling, detail::Constant::Tau, prov);
        return make([s, tau](double r) { return (r - kSqrt2 * s(r / kSqrt2)) / (4.0 * tau); },
                    detail::scale_breakpoints(bps, kSqrt2));
    }
    case Role::Activation: {
        const RoleFunction phi = f;
        if (to == Role::Diffusivity) {
            return make(
                [phi](double r) {
                    if (std::abs(r) < kSingularRadius) return detail::odd_quotient_limit(phi);
                    return phi(r) / r;
                },
                same);
        }
        if (to == Role::Regulariser) {
            return make(
                [phi](double r) { return 2.0 * numerics::integrate_from_zero(phi, r, phi.breakpoints()); }, same);
        }
        const double tau = detail::require_constant(coupling, detail::Constant::Tau, prov);
        return make([phi, tau](double r) { return r - 2.0 * kSqrt2 * tau * phi(kSqrt2 * r); },
                    detail::scale_breakpoints(bps, 1.0 / kSqrt2));
    }
    }
    throw std::logic_error("translate: unreachable");
}

/// Estimate of the Lipschitz constant of an activation on [-r_max, r_max]:
/// the largest absolute difference quotient between consecutive points of
/// an equidistant grid with `samples` points.
[[nodiscard]] inline double estimate_lipschitz(const RoleFunction& phi, double r_max, std::size_t samples)
{
    if (phi.role() != Role::Activation) {
        throw std::invalid_argument("estimate_lipschitz: expected an activation function");
    }
    if (!std::isfinite(r_max) || r_max <= 0.0) {
        throw std::invalid_argument("estimate_lipschitz: r_max must be finite and positive");
    }
    if (samples < 2) throw std::invalid_argument("estimate_lipschitz: need at least two samples");

    const double step = 2.0 * r_max / static_cast<double>(samples - 1);
    double prev_r = -r_max;
    double prev_v = phi(prev_r);
    double lip = 0.0;
    for (std::size_t k = 1; k < samples; ++k) {
        const double r = k + 1 == samples ? r_max : -r_max + static_cast<double>(k) * step;
        const double v = phi(r);
        lip = std::max(lip, std::abs(v - prev_v) / (r - prev_r));
        prev_r = r;
        prev_v = v;
    }
    return lip;
}

struct MonotonicityWitness {
    bool monotone = true;
    double r1 = 0.0;  // r1 < r2 with phi(r1) > phi(r2) + tol, when not monotone
    double r2 = 0.0;
};

/// Checks whether phi is nondecreasing on an equidistant grid of [-r_max, r_max].
/// A decrease by more than `tol` between consecutive samples is reported as a witness.
[[nodiscard]] inline MonotonicityWitness check_monotone(const RoleFunction& phi, double r_max,
                                                        std::size_t samples, double tol = 1e-9)
{
    if (samples < 2) throw std::invalid_argument("check_monotone: need at least two samples");
    const double step = 2.0 * r_max / static_cast<double>(samples - 1);
    double prev_r = -r_max;
    double prev_v = phi(prev_r);
    for (std::size_t k = 1; k < samples; ++k) {
        const double r = -r_max + static_cast<double>(k) * step;
        const double v = phi(r);
        if (prev_v > v + tol) return {false, prev_r, r};
        prev_r = r;
        prev_v = v;
    }
    return {};
}

} // namespace diffnet
