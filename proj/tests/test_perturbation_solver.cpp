#include <cmath>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;

TEST(Config, Validation) {
    SolverConfig c;
    c.dt = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SolverConfig{};
    c.mu = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(parse_mode("bogus"), ConfigError);
    EXPECT_EQ(parse_mode("friction"), Mode::friction);
    EXPECT_EQ(parse_stepping("heun"), Stepping::heun);
}

TEST(Config, FrictionCertification) {
    SolverConfig c;
    c.mode = Mode::friction;
    c.mu = 0.5;
    c.Fr = 2.0;
    c.r_fric = 0.5;
    EXPECT_TRUE(c.friction_certified());
    EXPECT_DOUBLE_EQ(c.pressure_coefficient(), 0.25);
    c.r_fric = 1.0;
    EXPECT_FALSE(c.friction_certified());
}

TEST(Solver, ZeroPerturbationWithoutForcingIsAFixedPoint) {
    auto cfg = small_solver_config();
    cfg.forcing = false;
    const auto st = advance(small_state(cfg, 0.0, 1), cfg, 0.5);
    EXPECT_EQ(st.h2.max_abs(), 0.0);
    EXPECT_EQ(st.u2.max_abs(), 0.0);
}

TEST(Solver, ForcingDrivesU2AwayFromZero) {
    const auto cfg = small_solver_config();
    const auto st = small_state(cfg, 0.0, 1);
    const auto rhs = assemble_rhs(st, cfg);
    EXPECT_EQ(rhs.h2_rhs.max_abs(), 0.0);
    EXPECT_LE(relative_l2_difference(rhs.u2_rhs, -cfg.a * st.grad_log_rho1), 1e-14);
    const auto later = advance(st, cfg, 0.2);
    EXPECT_GT(later.u2.max_abs(), 0.0);
}

TEST(Solver, NamedTermsSumToTheRightHandSide) {
    const auto cfg = small_solver_config();
    const auto st = small_state(cfg, 0.05, 3);
    const auto rhs = assemble_rhs(st, cfg, true);
    ASSERT_EQ(rhs.h2_terms.size(), 3u);
    ASSERT_EQ(rhs.u2_terms.size(), 7u);
    SpectralField hs = SpectralField::zeros(st.grid(), 1), us = SpectralField::zeros(st.grid(), 2);
    for (const auto& t : rhs.h2_terms) hs += t.field;
    for (const auto& t : rhs.u2_terms) us += t.field;
    EXPECT_LE(relative_l2_difference(hs, rhs.h2_rhs), 1e-12);
    EXPECT_LE(relative_l2_difference(us, rhs.u2_rhs), 1e-12);
}

TEST(Solver, ImplicitViscosityMultipliers) {
    auto cfg = small_solver_config();
    cfg.explicit_terms = false;
    const Grid g = make_grid(2, 32, two_pi);
    // Gradient field: mu div D acts as mu Lap.
    const auto irr = SpectralField::sample_vector(g, [](const Point& x) {
        const double s = -std::sin(3.0 * x[0] + x[1]);
        return Point{3.0 * s, s, 0.0};
    });
    // Divergence-free field: mu div D acts as mu Lap / 2.
    const auto sol = SpectralField::sample_vector(g, [](const Point& x) {
        const double s = std::sin(3.0 * x[0] + x[1]);
        return Point{s, -3.0 * s, 0.0};
    });
    const double k2 = 10.0;
    const auto zero = SpectralField::zeros(g, 1);
    const auto a = step(make_state(zero, zero, irr, cfg), cfg);
    const auto b = step(make_state(zero, zero, sol, cfg), cfg);
    EXPECT_LE(relative_l2_difference(a.u2, irr * (1.0 / (1.0 + cfg.mu * k2 * cfg.dt))), 1e-13);
    EXPECT_LE(relative_l2_difference(b.u2, sol * (1.0 / (1.0 + 0.5 * cfg.mu * k2 * cfg.dt))), 1e-13);
}

TEST(Solver, RecompositionRoundTrip) {
    const auto cfg = small_solver_config();
    const auto st = small_state(cfg, 0.05, 5);
    const auto rc = recompose(st, cfg, false);
    const auto back = map_values(rc.rho, [](double x) { return std::log(x); }) -
                      map_values(st.q1, [](double x) { return std::log1p(x); });
    EXPECT_LE(relative_l2_difference(back, st.h2), 1e-12);
    EXPECT_LE(relative_l2_difference(rc.u - st.u1_cache, st.u2), 1e-14);
}

TEST(Solver, ShallowWaterPressureGapAtTheQuasiSolution) {
    // With h2 = u2 = 0 the frozen residual of the full system is a grad(rho1).
    const auto cfg = small_solver_config();
    const auto st = small_state(cfg, 0.0, 1);
    ResidualOptions ro;
    ro.source = ResidualSource::frozen_perturbation;
    const auto fr = full_residual(st, cfg, ro);
    const double expected = cfg.a * lp_norm(grad(st.q1), 2.0);
    EXPECT_LE(std::abs(fr.momentum_abs - expected) / expected, 1e-8);
    EXPECT_LE(fr.mass, 1e-10);
}

TEST(Solver, ReformulationClosesTheFullSystem) {
    const auto cfg = small_solver_config();
    const auto fr = full_residual(small_state(cfg, 0.05, 9, 128, 16.0, 8), cfg);
    EXPECT_LE(std::max(fr.mass, fr.momentum), 1e-8);
}

TEST(Solver, FrictionFullResidual) {
    SolverConfig cfg = small_solver_config();
    cfg.mode = Mode::friction;
    cfg.mu = 1.0;
    cfg.Fr = 1.0;
    cfg.r_fric = 1.0;
    const auto fr = full_residual(small_state(cfg, 0.0, 1), cfg);
    EXPECT_LE(std::max(fr.mass, fr.momentum), 1e-8);
}

TEST(Solver, HeatOnlyConservesMass) {
    auto cfg = small_solver_config();
    cfg.mode = Mode::heat_only;
    auto st = small_state(cfg, 0.0, 1);
    std::vector<double> m{total_mass(st)};
    for (int k = 0; k < 100; ++k) {
        st = step(st, cfg);
        m.push_back(total_mass(st));
    }
    EXPECT_LE(mass_drift(m), 1e-13);
}

TEST(Solver, ScalingEquivariance) {
    const auto cfg = small_solver_config();
    EXPECT_LE(scaling_check(scaling_state(cfg), cfg, 2), 1e-10);
    ScalingOptions o;
    o.adjust_pressure = false;
    EXPECT_GE(scaling_check(scaling_state(cfg), cfg, 2, o), 1e-6);
}

TEST(Solver, FirstOrderInTime) {
    EXPECT_NEAR(dt_convergence_order(small_solver_config(), 1.0, 0.02), 1.0, 0.2);
}

TEST(Solver, HeunIsSecondOrder) {
    auto cfg = small_solver_config();
    cfg.stepping = Stepping::heun;
    EXPECT_NEAR(dt_convergence_order(cfg, 1.0, 0.04), 2.0, 0.3);
}

TEST(Solver, CflCapIsEnforced) {
    auto cfg = small_solver_config();
    cfg.dt = 5.0;
    cfg.cfl_max = 1e-6;
    EXPECT_THROW(step(small_state(cfg, 0.05, 1), cfg), CflError);
}

TEST(Solver, BlowupKeepsTheLastValidState) {
    auto cfg = small_solver_config();
    cfg.blowup_threshold = 0.01;
    const auto st = small_state(cfg, 0.05, 1);
    try {
        (void)step(st, cfg);
        FAIL() << "expected a blowup";
    } catch (const BlowupError& e) {
        EXPECT_EQ(e.last_valid_state().t, 0.0);
    }
}

TEST(Diagnostics, FtNormOfZeroPerturbationVanishes) {
    const Grid g = make_grid(2, 64, 16.0);
    const auto f = build_dyadic_filter(g);
    FtAccumulator ft(f, 2.0, 0);
    const auto z1 = SpectralField::zeros(g, 1), z2 = SpectralField::zeros(g, 2);
    ft.add(0.0, z1, z2);
    ft.add(1.0, z1, z2);
    EXPECT_EQ(ft.value(), 0.0);
}
