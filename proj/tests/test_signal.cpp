#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

using namespace diffnet;

namespace {

void expect_values(const Signal1D& s, std::initializer_list<double> expected)
{
    ASSERT_EQ(s.size(), expected.size());
    std::size_t i = 0;
    for (double e : expected) EXPECT_DOUBLE_EQ(s[i++], e) << "index " << i - 1;
}

} // namespace

TEST(Signal, RejectsInvalidConstruction)
{
    EXPECT_THROW(Signal1D(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(Signal1D({1.0, 2.0}, 0.0), std::invalid_argument);
    EXPECT_THROW(Signal1D({1.0, 2.0}, -1.0), std::invalid_argument);
    EXPECT_THROW(Signal1D({1.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    EXPECT_THROW(Signal1D({std::numeric_limits<double>::infinity()}), std::invalid_argument);
    EXPECT_NO_THROW(Signal1D({3.0}));
}

TEST(Signal, ForwardDiffExamples)
{
    expect_values(forward_diff(Signal1D{0.0, 1.0, 3.0}), {1.0, 2.0, 0.0});
    expect_values(forward_diff(Signal1D{0.0, 0.0, 1.0, 0.0, 0.0}), {0.0, 1.0, -1.0, 0.0, 0.0});
    expect_values(forward_diff(Signal1D({2.5, 2.5, 2.5, 2.5}, 0.3)), {0.0, 0.0, 0.0, 0.0});
    expect_values(forward_diff(Signal1D({0.0, 1.0}, 0.5)), {2.0, 0.0});
}

TEST(Signal, BackwardDiffExamples)
{
    expect_values(backward_diff(Signal1D{0.0, 1.0, 3.0}), {0.0, 1.0, 2.0});
    expect_values(backward_diff(Signal1D{-4.0, -4.0, -4.0}), {0.0, 0.0, 0.0});
    expect_values(backward_diff(forward_diff(Signal1D{0.0, 0.0, 1.0, 0.0, 0.0})), {0.0, 1.0, -2.0, 1.0, 0.0});
}

TEST(Signal, SingleSampleIsFixed)
{
    expect_values(forward_diff(Signal1D{7.0}), {0.0});
    expect_values(backward_diff(Signal1D{7.0}), {0.0});
}

TEST(Signal, ForwardDiffSumTelescopes)
{
    diffnet::testing::SignalFactory gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        const double h = gen.real(0.1, 2.0);
        const Signal1D u = gen.uniform(gen.length(1, 50), -3.0, 3.0, h);
        double sum = 0.0;
        const Signal1D grad = forward_diff(u);
        for (double v : grad.values()) sum += v;
        EXPECT_NEAR(sum, (u[u.size() - 1] - u[0]) / h, 1e-12);
    }
}

TEST(Signal, FluxDivergenceConservesMass)
{
    diffnet::testing::SignalFactory gen(12);
    for (int trial = 0; trial < 200; ++trial) {
        const Signal1D u = gen.uniform(gen.length(1, 50), -3.0, 3.0, gen.real(0.1, 2.0));
        const Signal1D grad = forward_diff(u);
        const auto div = flux_divergence(grad.values(), u.h());
        double sum = 0.0;
        for (double v : div) sum += v;
        EXPECT_NEAR(sum, 0.0, 1e-11);
    }
}

TEST(Signal, DifferencesAreLinear)
{
    diffnet::testing::SignalFactory gen(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen.length(1, 40);
        const double h = gen.real(0.2, 2.0);
        const Signal1D u = gen.uniform(n, -1.0, 1.0, h);
        const Signal1D w = gen.uniform(n, -1.0, 1.0, h);
        const double a = gen.real(-2.0, 2.0);
        const double b = gen.real(-2.0, 2.0);
        std::vector<double> mix(n);
        for (std::size_t i = 0; i < n; ++i) mix[i] = a * u[i] + b * w[i];
        const Signal1D m(mix, h);
        for (auto op : {&forward_diff, &backward_diff}) {
            const Signal1D lhs = op(m);
            const Signal1D fu = op(u);
            const Signal1D fw = op(w);
            for (std::size_t i = 0; i < n; ++i) {
                const double rhs = a * fu[i] + b * fw[i];
                EXPECT_NEAR(lhs[i], rhs, 1e-14 * std::max(1.0, std::abs(rhs)) * 10.0 / h);
            }
        }
    }
}
