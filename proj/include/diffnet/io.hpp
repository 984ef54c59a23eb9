#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "signal.hpp"

namespace diffnet {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// CSV: one sample per line, optional first line "# h=<value>".
// Numbers are written with 17 significant digits so reading restores them
// exactly.
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::string format_sample(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string to_csv(const Signal1D& u)
{
    std::string out = "# h=" + format_sample(u.h()) + "\n";
    for (double x : u.values()) {
        out += format_sample(x);
        out += '\n';
    }
    return out;
}

[[nodiscard]] inline Signal1D parse_csv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<double> values;
    double h = 1.0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            const auto pos = line.find("h=", first);
            if (pos != std::string::npos) {
                try {
                    h = std::stod(line.substr(pos + 2));
                } catch (const std::exception&) {
                    throw IoError("csv line " + std::to_string(lineno) + ": bad grid size header");
                }
            }
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line.substr(first), &used);
        } catch (const std::exception&) {
            throw IoError("csv line " + std::to_string(lineno) + ": not a number: " + line);
        }
        if (line.find_first_not_of(" \t,", first + used) != std::string::npos) {
            throw IoError("csv line " + std::to_string(lineno) + ": expected one sample per line");
        }
        values.push_back(v);
    }
    if (values.empty()) throw IoError("csv: no samples");
    try {
        return Signal1D(std::move(values), h);
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("csv: ") + e.what());
    }
}

[[nodiscard]] inline Signal1D read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed: " + path);
}

inline void write_csv(const std::string& path, const Signal1D& u) { write_text(path, to_csv(u)); }

// ---------------------------------------------------------------------------
// Test signals
// ---------------------------------------------------------------------------

enum class SignalKind { Step, Sine, Piecewise, Spike };

/// Deterministic test signals of length n, scaled by `amplitude`:
///   step:      0 for i < n/2, 1 from i = n/2 on
///   sine:      sin(2 pi i / n)
///   piecewise: 0, 1, -0.5, 0.5 on the four quarters [0,n/4), [n/4,n/2), ...
///   spike:     1 at i = n/2 (integer division), 0 elsewhere
[[nodiscard]] inline Signal1D generate_signal(SignalKind kind, std::size_t n, double amplitude = 1.0, double h = 1.0)
{
    if (n < 1) throw std::invalid_argument("generate_signal: n must be at least 1");
    if (!std::isfinite(amplitude)) throw std::invalid_argument("generate_signal: amplitude must be finite");
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        switch (kind) {
        case SignalKind::Step: v[i] = i >= n / 2 ? 1.0 : 0.0; break;
        case SignalKind::Sine:
            v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
            break;
        case SignalKind::Piecewise: {
            const std::size_t q = 4 * i / n;
            constexpr double levels[] = {0.0, 1.0, -0.5, 0.5};
            v[i] = levels[q];
            break;
        }
        case SignalKind::Spike: v[i] = i == n / 2 ? 1.0 : 0.0; break;
        }
        v[i] *= amplitude;
    }
    return Signal1D(std::move(v), h);
}

// ---------------------------------------------------------------------------
// Noise
// ---------------------------------------------------------------------------

enum class NoiseKind { None, Gaussian, Uniform };

struct NoiseModel {
    NoiseKind kind = NoiseKind::None;
    double scale = 0.0;  // sigma for Gaussian, half-width a for Uniform
};

/// Reproducible noise source: std::mt19937_64 (its output sequence is fixed
/// by the standard), top 53 bits to a double in [0, 1), Box-Muller for
/// normals. The standard library distributions are avoided because their
/// algorithms differ between implementations.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

[[nodiscard]] inline Signal1D add_noise(const Signal1D& u, const NoiseModel& model, std::uint64_t seed)
{
    if (!std::isfinite(model.scale) || model.scale < 0.0) {
        throw std::invalid_argument("add_noise: noise scale must be finite and nonnegative");
    }
    if (model.kind == NoiseKind::None || model.scale == 0.0) return u;
    NoiseSource rng(seed);
    std::vector<double> v = u.to_vector();
    for (double& x : v) {
        if (model.kind == NoiseKind::Gaussian) {
            x += model.scale * rng.normal();
        } else {
            x += model.scale * (2.0 * rng.uniform01() - 1.0);
        }
    }
    return u.with_values(std::move(v));
}

} // namespace diffnet
