#include <cmath>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;

TEST(Heat, SingleModeDecaysExactly) {
    const Grid g = make_grid(2, 32, two_pi);
    const auto q = SpectralField::sample(g, [](const Point& x) { return 0.2 * std::cos(3.0 * x[0] + 4.0 * x[1]); });
    const auto s = heat_evolve(q, 0.1, 0.7);
    EXPECT_LE(relative_l2_difference(s.q1, q * std::exp(-0.1 * 25.0 * 0.7)), 1e-14);
}

TEST(Heat, GaussianSpreadsLikeTheKernel) {
    // exp(-|x|^2 / (4 mu t0)) evolves into (t0 / (t0 + t))^{N/2} exp(-|x|^2 / (4 mu (t0 + t))).
    const double mu = 0.5, t0 = 1.0, t = 3.0;
    const Grid g = make_grid(2, 256, 64.0);
    GaussianBump b;
    b.amplitude = 0.5;
    b.width = std::sqrt(4.0 * mu * t0);
    const auto s = heat_evolve(gaussian_bump(g, b), mu, t);
    b.amplitude = 0.5 * t0 / (t0 + t);
    b.width = std::sqrt(4.0 * mu * (t0 + t));
    EXPECT_LE(relative_l2_difference(s.q1, gaussian_bump(g, b)), 1e-12);
}

TEST(Heat, SemigroupProperty) {
    const Grid g = make_grid(2, 64, 16.0);
    const auto q = gaussian_bump(g, {});
    const auto a = heat_advance(heat_evolve(q, 0.2, 0.4), 0.6);
    EXPECT_LE(relative_l2_difference(a.q1, heat_evolve(q, 0.2, 1.0).q1), 1e-14);
}

TEST(Heat, RejectsDensityBelowFloor) {
    const Grid g = make_grid(1, 64, two_pi);
    const auto q = SpectralField::sample(g, [](const Point& x) { return -1.2 * std::cos(x[0]) * std::cos(x[0]); });
    EXPECT_THROW(heat_evolve(q, 0.1, 1.0), DensityFloorError);
}

TEST(Heat, MaximumPrinciple) {
    const Grid g = make_grid(2, 128, 32.0);
    const auto q0 = gaussian_bump(g, {});
    for (double t : {0.5, 2.0, 10.0, 50.0}) EXPECT_TRUE(max_principle_check(heat_evolve(q0, 0.1, t)).pass) << t;
}

TEST(QuasiSolution, PressurelessResidual1d) { EXPECT_LE(quasi_residual_1d(1024), 1e-8); }

TEST(QuasiSolution, PressurelessResidual2dConverges) {
    const double r64 = quasi_residual_2d(64), r128 = quasi_residual_2d(128), r256 = quasi_residual_2d(256);
    EXPECT_LE(r256, 1e-6);
    EXPECT_GE(r64 / r128, 10.0);
    EXPECT_GE(r128 / r256, 10.0);
}

TEST(QuasiSolution, ResidualAtLaterTimes) {
    const Grid g = make_grid(2, 256, 64.0);
    const auto q = gaussian_bump(g, {});
    for (double t : {1.0, 5.0}) EXPECT_LE(quasi_residual(heat_evolve(q, 0.1, t)).momentum, 1e-6) << t;
}

TEST(QuasiSolution, VelocityIsMinusMuGradLogRho) {
    // One dimension: rho = 1 + 0.3 sin x, u = -0.3 mu cos x / rho.
    const Grid g = make_grid(1, 256, two_pi);
    const double mu = 0.4;
    const auto q = SpectralField::sample(g, [](const Point& x) { return 0.3 * std::sin(x[0]); });
    VelocityOptions opt;
    opt.band_limit = false;
    const auto u = velocity_from_density(q, mu, opt);
    const auto expect =
        SpectralField::sample(g, [mu](const Point& x) { return -0.3 * mu * std::cos(x[0]) / (1.0 + 0.3 * std::sin(x[0])); });
    EXPECT_LE(relative_l2_difference(u, expect), 1e-12);
}

TEST(Friction, ExactWhenDragBalancesPressure) {
    const auto fr = friction_exact_residual(friction_state(), 1.0, 1.0);
    EXPECT_TRUE(fr.certified);
    EXPECT_LE(std::max(fr.mass, fr.momentum), 1e-8);
}

TEST(Friction, NegativeControl) {
    auto st = friction_state();
    st.mu = 0.5;
    const auto fr = friction_exact_residual(st, 1.0, 1.0);
    EXPECT_FALSE(fr.certified);
    EXPECT_GE(fr.momentum, 1e-3);
}

class KernelRate : public ::testing::TestWithParam<KernelCase> {};

TEST_P(KernelRate, MatchesExpectedExponent) {
    const auto fit = kernel_rate(GetParam());
    EXPECT_LE(fit.relative_error, 0.15) << "fitted " << fit.exponent << " expected " << fit.expected;
}

INSTANTIATE_TEST_SUITE_P(Cases, KernelRate, ::testing::ValuesIn(kernel_cases()),
                         [](const auto& info) { return kernel_name(info.param); });

TEST(KernelRate, ExpectedExponentFormula) {
    EXPECT_DOUBLE_EQ((KernelRateSpec{0, inf}.expected(2)), 1.0);
    EXPECT_DOUBLE_EQ((KernelRateSpec{1, inf}.expected(2)), 1.5);
    EXPECT_DOUBLE_EQ((KernelRateSpec{0, 2.0}.expected(1)), 0.25);
}

TEST(KernelRate, SaturatedWindowIsFlagged) {
    const Grid g = make_grid(1, 256, 16.0);
    EXPECT_THROW(kernel_decay_fit(gaussian_bump(g, {}), 1.0, {0, inf}, 1.0, 100.0), DiagnosticError);
}

TEST(HeatEstimate, ForcedSolveMatchesClosedFormForConstantForcing) {
    // d_t u - mu Lap u = f with f one constant-in-time mode: u = e^{-mu k^2 t} u0 + (1 - e^{-mu k^2 t}) f / (mu k^2).
    const Grid g = make_grid(1, 64, two_pi);
    const double mu = 0.3, k = 4.0, T = 2.0;
    const auto mode = SpectralField::sample(g, [k](const Point& x) { return std::cos(k * x[0]); });
    std::vector<Snapshot> f{{0.0, mode}, {1.0, mode}, {T, mode}};
    const auto u = forced_heat_solve(mode * 0.5, f, mu);
    const double z = mu * k * k;
    const double expect = 0.5 * std::exp(-z * T) + (1.0 - std::exp(-z * T)) / z;
    EXPECT_LE(relative_l2_difference(u.back().field, mode * expect), 1e-13);
}
