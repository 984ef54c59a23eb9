#pragma once

// Command-line front end: generate, noise, denoise, translate, stability, compare.
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 stability violation.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <diffnet/diffnet.hpp>

namespace diffnet::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kUnstable = 3 };

enum class Method { Diffusion, Wavelet, Variational, Resnet };

inline const std::map<std::string, Method> kMethods{
    {"diffusion", Method::Diffusion},
    {"wavelet", Method::Wavelet},
    {"variational", Method::Variational},
    {"resnet", Method::Resnet},
};

inline const std::map<std::string, SignalKind> kSignalKinds{
    {"step", SignalKind::Step},
    {"sine", SignalKind::Sine},
    {"piecewise", SignalKind::Piecewise},
    {"spike", SignalKind::Spike},
};

inline const std::map<std::string, NoiseKind> kNoiseKinds{
    {"none", NoiseKind::None},
    {"gaussian", NoiseKind::Gaussian},
    {"uniform", NoiseKind::Uniform},
};

inline const std::map<std::string, StabilityMode> kModes{
    {"maxmin", StabilityMode::MaxMin},
    {"sign-stable", StabilityMode::SignStable},
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything one denoising run needs.
struct RunConfig {
    Method method = Method::Diffusion;
    FamilySpec family;
    CouplingParams coupling{std::nullopt, std::nullopt, 1.0};
    std::optional<double> stopping_time;
    std::optional<std::size_t> steps;
    StabilityMode mode = StabilityMode::SignStable;
    std::string input;
    std::string signal_kind;
    std::size_t signal_length = 0;
    std::string output;
    std::string report;
    std::optional<std::uint64_t> seed;
    NoiseModel noise;

    void validate() const
    {
        if (stopping_time.has_value() == steps.has_value()) {
            throw UsageError("give exactly one of --stopping-time and --steps");
        }
        if (noise.kind != NoiseKind::None && !seed) {
            throw UsageError("--seed is required when noise is added");
        }
        if (input.empty() == signal_kind.empty()) {
            throw UsageError("give exactly one of --input and --signal");
        }
        family.validate();
        coupling.validate();
    }
};

/// Step size and count shared by all four methods.
struct Schedule {
    RoleFunction phi;
    double tau = 0.25;
    std::size_t steps = 0;
    double lipschitz = 0.0;
    double tau_bound = 0.0;
};

namespace detail {

inline Signal1D load_input(const RunConfig& cfg)
{
    Signal1D f = cfg.input.empty()
                     ? generate_signal(kSignalKinds.at(cfg.signal_kind), cfg.signal_length, 1.0, cfg.coupling.h)
                     : read_csv(cfg.input);
    if (cfg.noise.kind != NoiseKind::None) f = add_noise(f, cfg.noise, *cfg.seed);
    return f;
}

inline Schedule make_schedule(const RunConfig& cfg, const Signal1D& f)
{
    Schedule s{make_family_function(cfg.family, Role::Activation)};
    s.lipschitz = local_lipschitz(f, s.phi);
    s.tau_bound = s.lipschitz > 0.0 ? max_stable_tau(s.lipschitz, f.h(), cfg.mode)
                                    : std::numeric_limits<double>::infinity();
    if (cfg.stopping_time) {
        const double t = *cfg.stopping_time;
        if (!std::isfinite(t) || t < 0.0) throw UsageError("--stopping-time must be finite and nonnegative");
        s.steps = std::isfinite(s.tau_bound) ? steps_for(t, s.tau_bound) : (t > 0.0 ? 1 : 0);
        s.tau = s.steps > 0 ? t / static_cast<double>(s.steps) : cfg.coupling.tau.value_or(0.25);
        if (cfg.method == Method::Wavelet && s.steps > 0) {
            // Each shrinkage step is one step of fixed size tau; T must be a multiple of it.
            const double tau = cfg.coupling.tau.value_or(0.25);
            const double m = std::round(t / tau);
            if (std::abs(m * tau - t) > 1e-9 * std::max(1.0, t)) {
                throw UsageError("wavelet: --stopping-time must be a multiple of tau");
            }
            s.tau = tau;
            s.steps = static_cast<std::size_t>(m);
        }
    } else {
        s.steps = *cfg.steps;
        if (cfg.method == Method::Variational && cfg.coupling.alpha && s.steps > 0) {
            s.tau = *cfg.coupling.alpha / static_cast<double>(s.steps);
        } else {
            s.tau = cfg.coupling.tau.value_or(0.25);
        }
    }
    if (s.steps > 0 && s.tau > s.tau_bound * (1.0 + 1e-12)) {
        throw StabilityError("tau = " + format_sample(s.tau) + " exceeds the stability bound " +
                                 format_sample(s.tau_bound),
                             std::isfinite(s.tau_bound) ? steps_for(s.tau * s.steps, s.tau_bound) : 1);
    }
    return s;
}

inline RoleFunction shrinkage_for(const RunConfig& cfg, const Schedule& s)
{
    if (s.tau == 0.25) return make_family_function(cfg.family, Role::Shrinkage);
    return translate(s.phi, Role::Shrinkage, CouplingParams{s.tau, std::nullopt, 1.0});
}

inline Signal1D run_method(Method method, const RunConfig& cfg, const Schedule& s, const Signal1D& f)
{
    if (s.steps == 0) return f;
    switch (method) {
    case Method::Diffusion: return diffuse_steps(f, s.phi, s.tau, s.steps);
    case Method::Wavelet:
        if (f.h() != 1.0) throw UsageError("wavelet: requires grid size h = 1");
        return iterate_shrinkage(f, shrinkage_for(cfg, s), s.steps);
    case Method::Variational: {
        const EnergySpec spec(make_family_function(cfg.family, Role::Regulariser),
                              s.tau * static_cast<double>(s.steps));
        return minimize_by_diffusion(f, spec, s.steps);
    }
    case Method::Resnet: return chain_repeated(make_diffusion_block(s.phi, s.tau, f.h()), s.steps, f);
    }
    return f;
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text(path, text);
    }
}

struct FamilyOptions {
    std::string family = "constant";
    double lambda = 1.0;
    double theta = 1.0;

    void add_to(CLI::App* app)
    {
        app->add_option("--family", family, "constant|charbonnier|truncated-tv|perona-malik|truncated-bfb|truncated-quadratic")
            ->capture_default_str();
        app->add_option("--lambda", lambda, "contrast parameter")->capture_default_str();
        app->add_option("--theta", theta, "threshold parameter")->capture_default_str();
    }

    [[nodiscard]] FamilySpec spec() const
    {
        const auto f = parse_family(family);
        if (!f) throw UsageError("unknown family: " + family);
        FamilySpec s{*f, lambda, theta};
        s.validate();
        return s;
    }
};

struct RunOptions {
    FamilyOptions family;
    std::string method = "diffusion";
    std::optional<double> tau;
    std::optional<double> alpha;
    std::optional<double> stopping_time;
    std::optional<std::size_t> steps;
    std::string mode = "sign-stable";
    std::string input;
    std::string signal;
    std::size_t n = 64;
    double h = 1.0;
    std::string output;
    std::string report;
    std::string noise = "none";
    double sigma = 0.0;
    double amplitude = 0.0;
    std::optional<std::uint64_t> seed;

    void add_to(CLI::App* app, bool with_method)
    {
        family.add_to(app);
        if (with_method) app->add_option("--method", method, "diffusion|wavelet|variational|resnet")->capture_default_str();
        app->add_option("--tau", tau, "time step size (default 0.25)");
        app->add_option("--alpha", alpha, "regularisation weight (variational)");
        app->add_option("--stopping-time", stopping_time, "diffusion time T");
        app->add_option("--steps", steps, "number of steps / blocks");
        app->add_option("--mode", mode, "maxmin|sign-stable")->capture_default_str();
        app->add_option("--input", input, "input CSV");
        app->add_option("--signal", signal, "generate the input: step|sine|piecewise|spike");
        app->add_option("--n", n, "length of a generated input")->capture_default_str();
        app->add_option("--spacing", h, "grid size of a generated input")->capture_default_str();
        app->add_option("--output", output, "output CSV (default stdout)");
        app->add_option("--report", report, "stability report path");
        app->add_option("--noise", noise, "none|gaussian|uniform")->capture_default_str();
        app->add_option("--sigma", sigma, "gaussian standard deviation");
        app->add_option("--amplitude", amplitude, "uniform noise half-width");
        app->add_option("--seed", seed, "RNG seed");
    }

    [[nodiscard]] RunConfig config() const
    {
        RunConfig cfg;
        const auto m = kMethods.find(method);
        if (m == kMethods.end()) throw UsageError("unknown method: " + method);
        cfg.method = m->second;
        cfg.family = family.spec();
        cfg.coupling = CouplingParams{tau, alpha, h};
        cfg.stopping_time = stopping_time;
        cfg.steps = steps;
        const auto md = kModes.find(mode);
        if (md == kModes.end()) throw UsageError("unknown mode: " + mode);
        cfg.mode = md->second;
        cfg.input = input;
        cfg.signal_kind = signal;
        if (!signal.empty() && !kSignalKinds.contains(signal)) throw UsageError("unknown signal kind: " + signal);
        cfg.signal_length = n;
        cfg.output = output;
        cfg.report = report;
        cfg.seed = seed;
        const auto nk = kNoiseKinds.find(noise);
        if (nk == kNoiseKinds.end()) throw UsageError("unknown noise model: " + noise);
        cfg.noise = NoiseModel{nk->second, nk->second == NoiseKind::Uniform ? amplitude : sigma};
        cfg.validate();
        return cfg;
    }
};

} // namespace detail

/// Denoise according to `cfg`; writes the result and, if requested, a report.
inline int run(const RunConfig& cfg, std::ostream& out)
{
    const Signal1D f = detail::load_input(cfg);
    const Schedule s = detail::make_schedule(cfg, f);
    const Signal1D u = detail::run_method(cfg.method, cfg, s, f);
    detail::emit(cfg.output, to_csv(u), out);
    if (!cfg.report.empty()) {
        const StabilityReport rep = s.steps > 0 ? analyze(f, s.phi, s.tau, s.steps) : StabilityReport{};
        detail::emit(cfg.report, to_key_value(rep), out);
    }
    return kOk;
}

struct Comparison {
    std::map<std::string, Signal1D> outputs;
    std::vector<std::pair<std::string, double>> deltas;
    double max_delta = 0.0;
};

/// Runs all applicable methods with the same (tau, m) and measures pairwise
/// max-norm differences. The wavelet method is skipped when h != 1.
inline Comparison compare(const RunConfig& cfg)
{
    const Signal1D f = detail::load_input(cfg);
    const Schedule s = detail::make_schedule(cfg, f);
    Comparison c;
    for (const auto& [name, method] : kMethods) {
        if (method == Method::Wavelet && f.h() != 1.0) continue;
        c.outputs.emplace(name, detail::run_method(method, cfg, s, f));
    }
    for (auto a = c.outputs.begin(); a != c.outputs.end(); ++a) {
        for (auto b = std::next(a); b != c.outputs.end(); ++b) {
            const double d = max_abs_diff(a->second, b->second);
            c.deltas.emplace_back(a->first + "." + b->first, d);
            c.max_delta = std::max(c.max_delta, d);
        }
    }
    return c;
}

/// Entry point shared by the executable and the tests.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Diffusion, Haar shrinkage, variational and residual-network denoising of 1D signals"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "write a test signal");
    std::string gen_kind = "spike";
    std::size_t gen_n = 64;
    double gen_amp = 1.0;
    double gen_h = 1.0;
    std::string gen_out;
    gen->add_option("--kind", gen_kind, "step|sine|piecewise|spike")->capture_default_str();
    gen->add_option("--n", gen_n, "number of samples")->capture_default_str();
    gen->add_option("--amplitude", gen_amp, "scale factor")->capture_default_str();
    gen->add_option("--spacing", gen_h, "grid size")->capture_default_str();
    gen->add_option("--output", gen_out, "output CSV (default stdout)");

    // noise
    auto* noise = app.add_subcommand("noise", "add seeded noise to a signal");
    std::string noise_in, noise_out, noise_model = "gaussian";
    double noise_sigma = 0.0, noise_amp = 0.0;
    std::optional<std::uint64_t> noise_seed;
    noise->add_option("--input", noise_in, "input CSV")->required();
    noise->add_option("--output", noise_out, "output CSV (default stdout)");
    noise->add_option("--model", noise_model, "none|gaussian|uniform")->capture_default_str();
    noise->add_option("--sigma", noise_sigma, "gaussian standard deviation");
    noise->add_option("--amplitude", noise_amp, "uniform half-width");
    noise->add_option("--seed", noise_seed, "RNG seed (mt19937_64)");

    // denoise
    auto* denoise = app.add_subcommand("denoise", "denoise with one of the four methods");
    detail::RunOptions denoise_opts;
    denoise_opts.add_to(denoise, true);

    // translate
    auto* trans = app.add_subcommand("translate", "evaluate a dictionary translation");
    detail::FamilyOptions trans_family;
    trans_family.add_to(trans);
    std::string trans_from = "diffusivity", trans_to;
    std::optional<double> trans_at;
    double trans_range = 0.0;
    std::size_t trans_samples = 101;
    double trans_tau = 0.25, trans_alpha = 0.25;
    trans->add_option("--from", trans_from, "source role")->capture_default_str();
    trans->add_option("--to", trans_to, "target role")->required();
    trans->add_option("--at", trans_at, "evaluate at this r");
    trans->add_option("--range", trans_range, "tabulate on [-range, range]");
    trans->add_option("--samples", trans_samples, "table size")->capture_default_str();
    trans->add_option("--tau", trans_tau, "time step size")->capture_default_str();
    trans->add_option("--alpha", trans_alpha, "regularisation weight")->capture_default_str();

    // stability
    auto* stab = app.add_subcommand("stability", "report range and sign-change behaviour of the explicit scheme");
    detail::RunOptions stab_opts;
    stab_opts.add_to(stab, false);

    // compare
    auto* cmp = app.add_subcommand("compare", "run all methods with equivalent parameters and report deltas");
    detail::RunOptions cmp_opts;
    cmp_opts.add_to(cmp, false);
    double cmp_tol = 1e-12;
    cmp->add_option("--tolerance", cmp_tol, "agreement threshold")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }

    try {
        if (gen->parsed()) {
            const auto k = kSignalKinds.find(gen_kind);
            if (k == kSignalKinds.end()) throw UsageError("unknown signal kind: " + gen_kind);
            detail::emit(gen_out, to_csv(generate_signal(k->second, gen_n, gen_amp, gen_h)), out);
        } else if (noise->parsed()) {
            const auto k = kNoiseKinds.find(noise_model);
            if (k == kNoiseKinds.end()) throw UsageError("unknown noise model: " + noise_model);
            if (k->second != NoiseKind::None && !noise_seed) throw UsageError("--seed is required");
            const NoiseModel model{k->second, k->second == NoiseKind::Uniform ? noise_amp : noise_sigma};
            const Signal1D f = read_csv(noise_in);
            detail::emit(noise_out, to_csv(add_noise(f, model, noise_seed.value_or(0))), out);
        } else if (denoise->parsed()) {
            return run(denoise_opts.config(), out);
        } else if (trans->parsed()) {
            const auto from = parse_role(trans_from);
            const auto to = parse_role(trans_to);
            if (!from || !to) throw UsageError("unknown role");
            const RoleFunction src = make_family_function(trans_family.spec(), *from);
            const RoleFunction fn = translate(src, *to, CouplingParams{trans_tau, trans_alpha, 1.0});
            if (trans_at) {
                out << format_sample(fn(*trans_at)) << '\n';
            } else if (trans_range > 0.0 && trans_samples >= 2) {
                out << "# " << fn.describe() << '\n';
                for (std::size_t k = 0; k < trans_samples; ++k) {
                    const double r = -trans_range + 2.0 * trans_range * static_cast<double>(k) /
                                                        static_cast<double>(trans_samples - 1);
                    out << format_sample(r) << ',' << format_sample(fn(r)) << '\n';
                }
            } else {
                throw UsageError("translate: give --at or --range with --samples >= 2");
            }
        } else if (stab->parsed()) {
            stab_opts.method = "diffusion";
            RunConfig cfg = stab_opts.config();
            if (!cfg.steps) throw UsageError("stability: --steps is required");
            const Signal1D f = detail::load_input(cfg);
            const RoleFunction phi = make_family_function(cfg.family, Role::Activation);
            const StabilityReport rep = analyze(f, phi, cfg.coupling.tau.value_or(0.25), *cfg.steps);
            detail::emit(cfg.report.empty() ? cfg.output : cfg.report, to_key_value(rep), out);
            return rep.range_ok ? kOk : kUnstable;
        } else if (cmp->parsed()) {
            cmp_opts.method = "diffusion";
            const RunConfig cfg = cmp_opts.config();
            const Comparison c = compare(cfg);
            std::string text;
            for (const auto& [pair, d] : c.deltas) text += "delta." + pair + "=" + format_sample(d) + "\n";
            text += "max_delta=" + format_sample(c.max_delta) + "\n";
            text += std::string("agree=") + (c.max_delta <= cmp_tol ? "true" : "false") + "\n";
            detail::emit(cfg.output, text, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const StabilityError& e) {
        err << "error: " << e.what() << '\n';
        return kUnstable;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kOk;
}

} // namespace diffnet::cli
