// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--allow-fail ID]...
//
// Exit status is 0 when every criterion passes, or when the only failures are
// ones named with --allow-fail. Allowed failures are still printed as FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <diffnet/diffnet.hpp>

#include "diffnet_cli.hpp"

using namespace diffnet;

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double real(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    std::size_t length(std::size_t lo, std::size_t hi) { return lo + gen_() % (hi - lo + 1); }
    Signal1D signal(std::size_t n, double lo, double hi, double h = 1.0)
    {
        std::vector<double> v(n);
        for (double& x : v) x = real(lo, hi);
        return Signal1D(std::move(v), h);
    }

private:
    std::mt19937_64 gen_;
};

std::vector<FamilySpec> families()
{
    std::vector<FamilySpec> out;
    for (Family f : kAllFamilies) out.push_back(FamilySpec{f, 1.0, 1.0});
    return out;
}

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

Outcome dictionary_closure()
{
    double worst_alg = 0.0, worst_num = 0.0;
    for (const FamilySpec& spec : families()) {
        for (Role from : kAllRoles) {
            // both the analytic and the purely numeric Psi' path
            for (bool strip : {false, true}) {
                RoleFunction src = make_family_function(spec, from);
                if (strip) src = src.without_analytic_derivative();
                for (Role to : kAllRoles) {
                    if (from == to) continue;
                    const RoleFunction t = translate(src, to, CouplingParams::standard());
                    const bool numeric = to == Role::Regulariser || from == Role::Regulariser;
                    double& worst = numeric ? worst_num : worst_alg;
                    for (int k = 0; k < 100; ++k) {
                        const double r = -10.0 + 20.0 * k / 99.0;
                        worst = std::max(worst, std::abs(t(r) - eval_family(spec, to, r)));
                    }
                }
            }
        }
    }
    return {worst_alg <= 1e-12 && worst_num <= 1e-6,
            "algebraic max err " + fmt(worst_alg) + " (tol 1e-12), numeric max err " + fmt(worst_num) +
                " (tol 1e-6)"};
}

Outcome wavelet_equivalence()
{
    Rng rng(1002);
    double worst = 0.0;
    for (const FamilySpec& spec : families()) {
        const RoleFunction s = make_family_function(spec, Role::Shrinkage);
        const RoleFunction phi = translate(s, Role::Activation, CouplingParams::standard());
        for (int k = 0; k < 1000; ++k) {
            const Signal1D f = rng.signal(rng.length(2, 128), -3.0, 3.0);
            worst = std::max(worst, max_abs_diff(shift_invariant_step(f, s), explicit_step(f, phi, 0.25)));
        }
    }
    return {worst <= 1e-12, "max deviation " + fmt(worst) + " (tol 1e-12)"};
}

Outcome block_equivalence()
{
    Rng rng(1003);
    double worst = 0.0;
    for (const FamilySpec& spec : families()) {
        const RoleFunction phi = make_family_function(spec, Role::Activation);
        for (int k = 0; k < 1000; ++k) {
            const double h = k % 2 == 0 ? 1.0 : rng.real(0.5, 2.0);
            const double tau = rng.real(0.01, 0.25) * h * h;
            const Signal1D f = rng.signal(rng.length(1, 64), -2.0, 2.0, h);
            worst = std::max(worst,
                             max_abs_diff(apply_block(make_diffusion_block(phi, tau, h), f), explicit_step(f, phi, tau)));
        }
    }
    return {worst <= 1e-14, "max deviation " + fmt(worst) + " (tol 1e-14)"};
}

// Lipschitz constant of phi over every difference a range-preserving
// trajectory of f can produce.
double trajectory_lipschitz(const Signal1D& f, const RoleFunction& phi)
{
    const double spread = (max_value(f) - min_value(f)) / f.h();
    return estimate_lipschitz(phi, std::max(spread, 1.0), 20001);
}

Outcome deep_chain_stability()
{
    constexpr std::size_t kDepth = 10000;
    Rng rng(1004);
    std::size_t range_failures = 0, sign_failures = 0, runs = 0;
    double worst_overshoot = 0.0;
    for (const FamilySpec& spec : families()) {
        const RoleFunction phi = make_family_function(spec, Role::Activation);
        for (int k = 0; k < 100; ++k, ++runs) {
            const Signal1D f = rng.signal(rng.length(2, 32), -1.0, 1.0);
            const double lip = trajectory_lipschitz(f, phi);
            const double lo = min_value(f), hi = max_value(f);

            Signal1D u = f;
            const ResidualBlock maxmin =
                make_diffusion_block(phi, max_stable_tau(lip, f.h(), StabilityMode::MaxMin), f.h());
            bool range_ok = true;
            for (std::size_t layer = 0; layer < kDepth; ++layer) {
                u = apply_block(maxmin, u);
                const double over = std::max(lo - min_value(u), max_value(u) - hi);
                worst_overshoot = std::max(worst_overshoot, over);
                if (over > 1e-12) range_ok = false;
            }
            if (!range_ok) ++range_failures;

            const ResidualBlock sign =
                make_diffusion_block(phi, max_stable_tau(lip, f.h(), StabilityMode::SignStable), f.h());
            u = f;
            std::size_t prev = count_sign_changes(u);
            bool sign_ok = true;
            for (std::size_t layer = 0; layer < kDepth; ++layer) {
                u = apply_block(sign, u);
                const std::size_t now = count_sign_changes(u);
                if (now > prev) sign_ok = false;
                prev = now;
            }
            if (!sign_ok) ++sign_failures;
        }
    }

    // negative control
    const RoleFunction id = identity_activation();
    const Signal1D g{0.0, 1.0, 0.0};
    const ResidualBlock unstable = make_diffusion_block(id, 1.5 * max_stable_tau(1.0, 1.0, StabilityMode::MaxMin), 1.0);
    Signal1D v = g;
    std::size_t violated_at = 0;
    for (std::size_t step = 1; step <= 10 && violated_at == 0; ++step) {
        v = apply_block(unstable, v);
        if (min_value(v) < -1e-12 || max_value(v) > 1.0 + 1e-12) violated_at = step;
    }

    std::ostringstream os;
    os << runs << " signals x " << kDepth << " blocks: range failures " << range_failures << " (worst overshoot "
       << fmt(worst_overshoot) << "), sign-count increases " << sign_failures << "; negative control violated at step "
       << violated_at;
    return {range_failures == 0 && sign_failures == 0 && violated_at != 0, os.str()};
}

Outcome variational_convergence()
{
    Rng rng(1005);
    const Signal1D f = rng.signal(32, 0.0, 1.0);
    const EnergySpec tik(make_family_function({Family::Constant}, Role::Regulariser), 1.0);
    const Signal1D oracle = tikhonov_solve_oracle(f, 1.0);
    std::ostringstream os;
    bool ok = true;
    double prev = 0.0;
    double worst_ratio = 0.0;
    for (std::size_t m = 4; m <= 256; m *= 2) {
        const double err = max_abs_diff(minimize_by_diffusion(f, tik, m), oracle);
        os << "m=" << m << " err=" << fmt(err);
        if (m > 4) {
            const double ratio = err / prev;
            worst_ratio = std::max(worst_ratio, ratio);
            if (ratio > 0.75) ok = false;
            os << " ratio=" << fmt(ratio);
        }
        os << "; ";
        prev = err;
    }
    os << "worst ratio " << fmt(worst_ratio) << " (tol 0.75)";
    return {ok, os.str()};
}

Outcome variational_oracle_residual()
{
    Rng rng(1006);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double h = rng.real(0.5, 2.0);
        const Signal1D f = rng.signal(rng.length(1, 128), -1.0, 1.0, h);
        const double alpha = rng.real(0.01, 5.0);
        const EnergySpec tik(make_family_function({Family::Constant}, Role::Regulariser), alpha);
        const Signal1D res = euler_lagrange_residual(tikhonov_solve_oracle(f, alpha), f, tik);
        for (double r : res.values()) {
            worst = std::max(worst, std::abs(r));
        }
    }
    return {worst <= 1e-10, "max residual " + fmt(worst) + " (tol 1e-10)"};
}

Outcome variational_hand_case()
{
    const Signal1D u = tikhonov_solve_oracle(Signal1D{0.0, 1.0}, 0.25);
    const double err = std::max(std::abs(u[0] - 1.0 / 6.0), std::abs(u[1] - 5.0 / 6.0));
    return {err <= 1e-12, "error " + fmt(err) + " (tol 1e-12)"};
}

Outcome gradient_check()
{
    Rng rng(1007);
    double worst = 0.0;
    for (const FamilySpec& spec : families()) {
        for (int k = 0; k < 100; ++k) {
            const EnergySpec e(make_family_function(spec, Role::Regulariser), rng.real(0.1, 1.0));
            const std::size_t n = rng.length(2, 24);
            const double h = rng.real(0.5, 2.0);
            const Signal1D u = rng.signal(n, -2.0, 2.0, h);
            const Signal1D f = rng.signal(n, -2.0, 2.0, h);
            const std::vector<double> g = energy_gradient(u, f, e);
            double diff = 0.0, scale = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<double> up = u.to_vector(), dn = u.to_vector();
                constexpr double d = 1e-6;
                up[j] += d;
                dn[j] -= d;
                const double fd =
                    (discrete_energy(u.with_values(up), f, e) - discrete_energy(u.with_values(dn), f, e)) / (2.0 * d);
                diff = std::max(diff, std::abs(g[j] - fd));
                scale = std::max(scale, std::abs(fd));
            }
            worst = std::max(worst, diff / scale);
        }
    }
    return {worst <= 1e-5, "max relative error " + fmt(worst) + " (tol 1e-5)"};
}

Outcome relu_identity()
{
    const FamilySpec tv{Family::TruncatedTV, 1.0, 1.0};
    double worst = 0.0;
    constexpr int kPoints = 100000;
    for (int k = 0; k < kPoints; ++k) {
        const double r = -10.0 + 20.0 * k / (kPoints - 1);
        worst = std::max(worst, std::abs(truncated_tv_via_relu(tv.threshold, r) - eval_family(tv, Role::Activation, r)));
    }
    return {worst <= 1e-14, "max deviation " + fmt(worst) + " over 1e5 points (tol 1e-14)"};
}

Outcome monotonicity_split()
{
    std::ostringstream os;
    bool ok = true;
    for (const FamilySpec& spec : families()) {
        const bool monotone = check_monotone(make_family_function(spec, Role::Activation), 10.0, 20001).monotone;
        const bool expected = spec.family == Family::Constant || spec.family == Family::Charbonnier ||
                              spec.family == Family::TruncatedTV;
        if (monotone != expected) ok = false;
        os << to_string(spec.family) << '=' << (monotone ? "monotone" : "nonmonotone") << ' ';
    }
    return {ok, os.str()};
}

int invoke(const std::vector<std::string>& args, std::string& out)
{
    std::vector<const char*> argv{"diffnet"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

Outcome cli_end_to_end()
{
    std::string report;
    const int code = invoke({"compare", "--signal", "spike", "--n", "9", "--family", "constant", "--tau", "0.25",
                             "--steps", "1"},
                            report);
    double max_delta = -1.0;
    std::istringstream in(report);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("max_delta=")) max_delta = std::stod(line.substr(10));
    }

    std::string a, b;
    const std::vector<std::string> noisy{"denoise",  "--signal", "piecewise", "--n",       "64", "--noise",
                                         "gaussian", "--sigma",  "0.1",       "--seed",    "42", "--family",
                                         "perona-malik", "--stopping-time", "3"};
    const int ca = invoke(noisy, a);
    const int cb = invoke(noisy, b);
    const bool identical = ca == 0 && cb == 0 && !a.empty() && a == b;

    std::ostringstream os;
    os << "compare exit " << code << ", max delta " << fmt(max_delta) << " (tol 1e-12); seeded reruns "
       << (identical ? "byte-identical" : "differ");
    return {code == 0 && max_delta >= 0.0 && max_delta <= 1e-12 && identical, os.str()};
}

struct Criterion {
    std::string id;
    std::string name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    std::set<std::string> allowed;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--allow-fail") == 0 && i + 1 < argc) {
            allowed.insert(argv[++i]);
        } else {
            std::fprintf(stderr, "usage: %s [--allow-fail ID]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<Criterion> criteria{
        {"1", "dictionary closure", dictionary_closure},
        {"2", "wavelet/diffusion equivalence", wavelet_equivalence},
        {"3", "diffusion block equivalence", block_equivalence},
        {"4", "deep chain stability", deep_chain_stability},
        {"5a", "variational convergence rate", variational_convergence},
        {"5b", "oracle Euler-Lagrange residual", variational_oracle_residual},
        {"5c", "variational hand case", variational_hand_case},
        {"6", "energy gradient check", gradient_check},
        {"7", "ReLU identity", relu_identity},
        {"8", "monotonicity split", monotonicity_split},
        {"9", "CLI end to end", cli_end_to_end},
    };

    int blocking = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool tolerated = !o.pass && allowed.contains(c.id);
        std::printf("%s [%s] %s: %s (%.2fs)%s\n", o.pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(),
                    o.detail.c_str(), secs, tolerated ? " [allowed]" : "");
        if (!o.pass && !tolerated) ++blocking;
    }
    return blocking == 0 ? 0 : 1;
}
