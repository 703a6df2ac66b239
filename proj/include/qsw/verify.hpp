#pragma once

// Verification suites. Every check reports its measured value and threshold;
// suites only collect checks, they never throw on failure.

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsw/besov.hpp"
#include "qsw/decay_fit.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/estimates.hpp"
#include "qsw/initial_data.hpp"
#include "qsw/paraproduct.hpp"
#include "qsw/perturbation_solver.hpp"
#include "qsw/quasi_solution.hpp"
#include "qsw/run_config.hpp"
#include "qsw/runner.hpp"

namespace qsw {

struct Check {
    std::string suite;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    /// "<=", ">=", or "band" (|value - threshold| <= tolerance).
    std::string relation = "<=";
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

/// Short scientific rendering for check details.
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline Check check_le(std::string suite, std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(suite), std::move(name), value, threshold, "<=", 0.0, value <= threshold, std::move(detail)};
}

inline Check check_ge(std::string suite, std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(suite), std::move(name), value, threshold, ">=", 0.0, value >= threshold, std::move(detail)};
}

inline Check check_band(std::string suite, std::string name, double value, double target, double tol,
                        std::string detail = {}) {
    return {std::move(suite), std::move(name), value, target, "band", tol, std::abs(value - target) <= tol,
            std::move(detail)};
}

/// Runs a check body, turning an exception into a failed entry.
inline Check guarded(const std::string& suite, const std::string& name, const std::function<Check()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        Check c;
        c.suite = suite;
        c.name = name;
        c.value = std::nan("");
        c.pass = false;
        c.detail = e.what();
        return c;
    }
}

struct VerifyReport {
    std::vector<Check> checks;

    bool pass() const {
        for (const auto& c : checks) {
            if (!c.pass) return false;
        }
        return !checks.empty();
    }
    void add(Check c) { checks.push_back(std::move(c)); }
    void append(const VerifyReport& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
};

inline nlohmann::json to_json(const Check& c) {
    nlohmann::json j{{"suite", c.suite}, {"name", c.name}, {"relation", c.relation}, {"pass", c.pass}};
    j["value"] = std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json(nullptr);
    j["threshold"] = c.threshold;
    if (c.relation == "band") j["tolerance"] = c.tolerance;
    if (!c.detail.empty()) j["detail"] = c.detail;
    return j;
}

inline nlohmann::json to_json(const VerifyReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c));
    return {{"pass", r.pass()}, {"checks", checks}};
}

// ---------------------------------------------------------------- lp

/// max |sum_l phi(2^-l xi) - 1| over the nonzero modes.
inline double partition_error(const Grid& g) {
    const auto f = build_dyadic_filter(g);
    const auto s = f.level_sum(f.l_min(), f.l_max());
    double e = 0.0;
    for (std::size_t m = 1; m < s.size(); ++m) e = std::max(e, std::abs(s[m] - 1.0));
    return e;
}

/// Worst relative L2 error of sum_l Delta_l u against u - mean.
inline double reconstruction_error(const Grid& g, int samples, std::uint64_t seed) {
    const auto f = build_dyadic_filter(g);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        auto u = random_band_limited(g, {}, seed + static_cast<std::uint64_t>(i));
        u = u + 0.7;  // a mean the blocks must drop
        SpectralField acc = SpectralField::zeros(g, 1);
        for (int l = f.l_min(); l <= f.l_max(); ++l) acc += dyadic_block(f, u, l);
        worst = std::max(worst, relative_l2_difference(acc, u - u.mean()));
    }
    return worst;
}

/// max over modes and |l - m| >= 2 of phi_l phi_m.
inline double orthogonality_defect(const Grid& g) {
    const auto f = build_dyadic_filter(g);
    double worst = 0.0;
    for (int l = f.l_min(); l <= f.l_max(); ++l) {
        for (const auto& e : f.entries(l)) {
            for (int m = l + 2; m <= f.l_max(); ++m) worst = std::max(worst, e.weight * f.weight(m, e.mode));
        }
    }
    return worst;
}

inline VerifyReport verify_lp() {
    VerifyReport r;
    const std::string s = "lp";
    r.add(guarded(s, "partition_1d", [&] { return check_le(s, "partition_1d", partition_error(make_grid(1, 1024, two_pi)), 1e-10); }));
    r.add(guarded(s, "partition_2d", [&] { return check_le(s, "partition_2d", partition_error(make_grid(2, 128, 64.0)), 1e-10); }));
    r.add(guarded(s, "partition_3d", [&] { return check_le(s, "partition_3d", partition_error(make_grid(3, 32, two_pi)), 1e-10); }));
    r.add(guarded(s, "reconstruction_1d", [&] { return check_le(s, "reconstruction_1d", reconstruction_error(make_grid(1, 512, two_pi), 10, 11), 1e-10); }));
    r.add(guarded(s, "reconstruction_2d", [&] { return check_le(s, "reconstruction_2d", reconstruction_error(make_grid(2, 128, 10.0), 10, 21), 1e-10); }));
    r.add(guarded(s, "almost_orthogonality", [&] { return check_le(s, "almost_orthogonality", orthogonality_defect(make_grid(2, 128, two_pi)), 0.0); }));
    return r;
}

// ---------------------------------------------------------------- besov

inline VerifyReport verify_besov() {
    VerifyReport r;
    const std::string s = "besov";
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 31);
    r.add(guarded(s, "homogeneity", [&] {
        const BesovSpec spec{0.5, 3.0, 2.0};
        const double a = besov_norm(f, -2.5 * u, spec);
        const double b = 2.5 * besov_norm(f, u, spec);
        return check_le(s, "homogeneity", std::abs(a - b) / b, 1e-12);
    }));
    r.add(guarded(s, "hybrid_uniform_matches_plain", [&] {
        const BesovSpec spec{1.0, 2.0, 1.0};
        const double a = hybrid_besov_norm(f, u, HybridBesovSpec::uniform(spec, 1));
        const double b = besov_norm(f, u, spec);
        return check_le(s, "hybrid_uniform_matches_plain", std::abs(a - b) / b, 1e-12);
    }));
    r.add(guarded(s, "chemin_lerner_constant_in_time", [&] {
        const BesovSpec spec{0.0, 2.0, 1.0};
        std::vector<Snapshot> snaps{{0.0, u}, {0.5, u}, {2.0, u}};
        const double a = time_besov_norm(f, snaps, inf, spec);
        const double b = besov_norm(f, u, spec);
        const double c = time_besov_norm(f, snaps, 1.0, spec);
        return check_le(s, "chemin_lerner_constant_in_time", std::max(std::abs(a - b), std::abs(c - 2.0 * b)) / b, 1e-12);
    }));
    r.add(guarded(s, "heat_characterization_finite", [&] {
        const auto h = heat_characterization_ratio(f, u, 0.5, 2.0, 2.0);
        return check_le(s, "heat_characterization_finite", std::abs(std::log(h.ratio)), std::log(100.0),
                        "log of the two-sided ratio");
    }));
    return r;
}

// ---------------------------------------------------------------- estimates

/// Fresh-seed maxima of the estimate ratios against the frozen sweep constants.
inline VerifyReport verify_estimates() {
    VerifyReport r;
    const std::string s = "estimates";
    std::map<std::string, double> fresh;
    try {
        fresh = sweep_estimate_maxima(fresh_first_seed, fresh_seed_count);
    } catch (const std::exception& e) {
        Check c;
        c.suite = s;
        c.name = "estimate_sweep";
        c.value = std::nan("");
        c.detail = e.what();
        r.add(c);
        return r;
    }
    for (const auto& [name, frozen] : frozen_estimate_maxima()) {
        const auto it = fresh.find(name);
        const double v = it == fresh.end() ? std::nan("") : it->second;
        r.add(check_le(s, name, v, estimate_margin * frozen, "frozen max " + sci(frozen)));
    }
    return r;
}

// ---------------------------------------------------------------- paraproduct

/// Worst relative L2 error of T_u v + T_v u + R(u, v) against the dealiased product.
inline double bony_identity_error(int n, int pairs, std::uint64_t seed) {
    const Grid g = make_grid(2, n, two_pi);
    const auto f = build_dyadic_filter(g);
    double worst = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const auto u = random_band_limited(g, {}, seed + 2 * static_cast<std::uint64_t>(i)) + 0.3;
        const auto v = random_band_limited(g, {}, seed + 2 * static_cast<std::uint64_t>(i) + 1) - 0.2;
        const auto b = bony_decompose(f, u, v);
        worst = std::max(worst, relative_l2_difference(b.Tuv + b.Tvu + b.Ruv, dealiased_multiply(u, v)));
    }
    return worst;
}

inline VerifyReport verify_paraproduct(int pairs = 100) {
    VerifyReport r;
    const std::string s = "paraproduct";
    r.add(guarded(s, "bony_identity_128", [&] { return check_le(s, "bony_identity_128", bony_identity_error(128, pairs, 1000), 1e-12); }));
    r.add(guarded(s, "constant_paraproduct", [&] {
        const Grid g = make_grid(2, 64, two_pi);
        const auto f = build_dyadic_filter(g);
        const auto v = random_band_limited(g, {}, 5) + 1.0;
        const auto c = SpectralField::zeros(g, 1) + 2.0;
        // T_c v = c (v - mean v) with the mean carried by the low cut-off.
        const auto t = para(f, c, v);
        return check_le(s, "constant_paraproduct", relative_l2_difference(t, 2.0 * (v - v.mean())), 1e-12);
    }));
    return r;
}

// ---------------------------------------------------------------- quasi

/// 1D data with rho1 in [0.6, 1.4].
inline SpectralField smooth_profile_1d(const Grid& g) {
    return SpectralField::sample(g, [](const Point& x) { return 0.45 * std::sin(x[0]) * std::cos(std::sin(x[0])); });
}

inline double quasi_residual_1d(int n) {
    const Grid g = make_grid(1, n, two_pi);
    return quasi_residual(heat_evolve(smooth_profile_1d(g), 0.3, 0.0)).momentum;
}

/// Decay-run bump on a period-64 box.
inline double quasi_residual_2d(int n) {
    const Grid g = make_grid(2, n, 64.0);
    return quasi_residual(heat_evolve(gaussian_bump(g, {}), 0.1, 0.0)).momentum;
}

inline HeatState friction_state() {
    const Grid g = make_grid(2, 64, two_pi);
    const auto q = SpectralField::sample(g, [](const Point& x) { return 0.4 * std::sin(x[0]) * std::cos(x[1]); });
    return heat_evolve(q, 1.0, 0.0);
}

struct KernelCase {
    int dim;
    KernelRateSpec spec;
};

inline const std::vector<KernelCase>& kernel_cases() {
    static const std::vector<KernelCase> cases{{1, {0, inf}}, {1, {1, inf}}, {1, {0, 2.0}},
                                               {2, {0, inf}}, {2, {1, inf}}, {2, {0, 2.0}}};
    return cases;
}

/// Heat kernel profile at t = 1 (Gaussian of variance 2 mu per axis), so the
/// evolved field is exactly the kernel at 1 + t.
inline KernelDecayFit kernel_rate(const KernelCase& c) {
    const double mu = 1.0;
    const Grid g = c.dim == 1 ? make_grid(1, 1024, 256.0) : make_grid(2, 256, 128.0);
    GaussianBump b;
    b.amplitude = 1.0;
    b.width = std::sqrt(4.0 * mu);
    const double t1 = c.dim == 1 ? 100.0 : 50.0;
    return kernel_decay_fit(gaussian_bump(g, b), mu, c.spec, 1.0, t1);
}

inline std::string kernel_name(const KernelCase& c) {
    return "kernel_N" + std::to_string(c.dim) + "_alpha" + std::to_string(c.spec.alpha_order) + "_p" +
           (std::isinf(c.spec.p) ? std::string("inf") : std::to_string(static_cast<int>(c.spec.p)));
}

inline VerifyReport verify_quasi() {
    VerifyReport r;
    const std::string s = "quasi";
    r.add(guarded(s, "quasi_1d_1024", [&] { return check_le(s, "quasi_1d_1024", quasi_residual_1d(1024), 1e-8); }));
    r.add(guarded(s, "quasi_2d_256", [&] {
        const double r64 = quasi_residual_2d(64), r128 = quasi_residual_2d(128), r256 = quasi_residual_2d(256);
        const double worst_ratio = std::min(r64 / r128, r128 / r256);
        Check c = check_le(s, "quasi_2d_256", r256, 1e-6);
        c.detail = "64/128/256: " + sci(r64) + " " + sci(r128) + " " + sci(r256);
        if (!(worst_ratio >= 10.0)) {
            c.pass = false;
            c.detail += " (less than 10x per doubling)";
        }
        return c;
    }));
    r.add(guarded(s, "friction_exact", [&] {
        const auto fr = friction_exact_residual(friction_state(), 1.0, 1.0);
        return check_le(s, "friction_exact", std::max(fr.mass, fr.momentum), 1e-8);
    }));
    r.add(guarded(s, "friction_negative_control", [&] {
        auto st = friction_state();
        st.mu = 0.5;
        const auto fr = friction_exact_residual(st, 1.0, 1.0);
        return check_ge(s, "friction_negative_control", fr.momentum, 1e-3);
    }));
    r.add(guarded(s, "max_principle", [&] {
        const Grid g = make_grid(2, 128, 32.0);
        double worst = 0.0;
        const auto q0 = gaussian_bump(g, {});
        for (double t : {0.5, 2.0, 10.0, 50.0}) {
            const auto st = heat_evolve(q0, 0.1, t);
            const auto mp = max_principle_check(st);
            worst = std::max({worst, st.rho_min0 - mp.min, mp.max - st.rho_max0});
        }
        return check_le(s, "max_principle", worst, 1e-8);
    }));
    for (const auto& kc : kernel_cases()) {
        const auto name = kernel_name(kc);
        r.add(guarded(s, name, [&] {
            const auto fit = kernel_rate(kc);
            Check c = check_le(s, name, fit.relative_error, 0.15);
            c.detail = "fitted " + sci(fit.exponent) + " expected " + sci(fit.expected);
            return c;
        }));
    }
    return r;
}

// ---------------------------------------------------------------- solver

/// Small resolved configuration for solver checks.
inline SolverConfig small_solver_config() {
    SolverConfig c;
    c.mu = 0.1;
    c.a = 1.0;
    c.dt = 0.01;
    return c;
}

inline SimState small_state(const SolverConfig& cfg, double eps, std::uint64_t seed, int n = 64, double period = 16.0,
                            int kmax = 0) {
    const Grid g = make_grid(2, n, period);
    const auto q1 = gaussian_bump(g, {});
    RandomFieldSpec rs;
    rs.kmax = kmax > 0 ? kmax : n / 6;
    auto h2 = random_band_limited(g, rs, seed);
    rs.components = 2;
    auto u2 = random_band_limited(g, rs, seed + 1);
    h2 = h2 * (eps / std::max(lp_norm(h2, inf), 1e-300));
    u2 = u2 * (eps / std::max(lp_norm(u2, inf), 1e-300));
    return make_state(q1, h2, u2, cfg);
}

inline SimState advance(SimState s, const SolverConfig& cfg, double t_end) {
    const auto steps = static_cast<long>(std::llround(t_end / cfg.dt));
    for (long k = 0; k < steps; ++k) s = step(s, cfg);
    return s;
}

/// Observed order from three runs at dt, dt/2, dt/4 (Richardson ratio of
/// successive differences of (h2, u2)).
inline double dt_convergence_order(SolverConfig cfg, double t_end, double dt0) {
    std::vector<SimState> out;
    for (int i = 0; i < 3; ++i) {
        cfg.dt = dt0 / static_cast<double>(1 << i);
        out.push_back(advance(small_state(cfg, 1e-2, 7), cfg, t_end));
    }
    auto diff = [](const SimState& a, const SimState& b) {
        return std::hypot(lp_norm(a.h2 - b.h2, 2.0), lp_norm(a.u2 - b.u2, 2.0));
    };
    return std::log2(diff(out[0], out[1]) / diff(out[1], out[2]));
}

/// Compact dilation-compatible state for the scaling check.
inline SimState scaling_state(const SolverConfig& cfg) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto q1 = SpectralField::sample(g, [](const Point& x) { return 0.3 * std::sin(x[0]) * std::cos(2.0 * x[1]); });
    const auto h2 = SpectralField::sample(g, [](const Point& x) { return 0.05 * std::cos(x[0] + x[1]); });
    const auto u2 = SpectralField::sample_vector(g, [](const Point& x) {
        return Point{0.02 * std::sin(2.0 * x[1]), -0.03 * std::cos(x[0]), 0.0};
    });
    return make_state(q1, h2, u2, cfg);
}

inline VerifyReport verify_solver() {
    VerifyReport r;
    const std::string s = "solver";
    r.add(guarded(s, "zero_perturbation_fixed_point", [&] {
        auto cfg = small_solver_config();
        cfg.forcing = false;
        const auto st = advance(small_state(cfg, 0.0, 1), cfg, 0.5);
        return check_le(s, "zero_perturbation_fixed_point", std::max(st.h2.max_abs(), st.u2.max_abs()), 0.0);
    }));
    r.add(guarded(s, "forcing_departure_rate", [&] {
        const auto cfg = small_solver_config();
        const auto st = small_state(cfg, 0.0, 1);
        const auto rhs = assemble_rhs(st, cfg);
        const auto expect = -cfg.a * st.grad_log_rho1;
        return check_le(s, "forcing_departure_rate", relative_l2_difference(rhs.u2_rhs, expect), 1e-14);
    }));
    r.add(guarded(s, "rhs_term_sum", [&] {
        const auto cfg = small_solver_config();
        const auto st = small_state(cfg, 0.05, 3);
        const auto rhs = assemble_rhs(st, cfg, true);
        SpectralField hs = SpectralField::zeros(st.grid(), 1), us = SpectralField::zeros(st.grid(), 2);
        for (const auto& t : rhs.h2_terms) hs += t.field;
        for (const auto& t : rhs.u2_terms) us += t.field;
        return check_le(s, "rhs_term_sum",
                        std::max(relative_l2_difference(hs, rhs.h2_rhs), relative_l2_difference(us, rhs.u2_rhs)), 1e-12);
    }));
    r.add(guarded(s, "diffusion_multiplier", [&] {
        auto cfg = small_solver_config();
        cfg.explicit_terms = false;
        const Grid g = make_grid(2, 32, two_pi);
        // irrotational single mode u = grad cos(3x + y)
        const auto u2 = SpectralField::sample_vector(g, [](const Point& x) {
            const double sn = -std::sin(3.0 * x[0] + x[1]);
            return Point{3.0 * sn, sn, 0.0};
        });
        auto st = make_state(SpectralField::zeros(g, 1), SpectralField::zeros(g, 1), u2, cfg);
        const double k2 = 10.0;
        st = step(st, cfg);
        const auto expect = u2 * (1.0 / (1.0 + cfg.mu * k2 * cfg.dt));
        return check_le(s, "diffusion_multiplier", relative_l2_difference(st.u2, expect), 1e-13);
    }));
    r.add(guarded(s, "recompose_round_trip", [&] {
        const auto cfg = small_solver_config();
        const auto st = small_state(cfg, 0.05, 5);
        const auto rc = recompose(st, cfg, false);
        const auto back = map_values(rc.rho, [](double x) { return std::log(x); }) -
                          map_values(st.q1, [](double x) { return std::log1p(x); });
        return check_le(s, "recompose_round_trip", relative_l2_difference(back, st.h2), 1e-12);
    }));
    r.add(guarded(s, "shallow_water_pressure_gap", [&] {
        const auto cfg = small_solver_config();
        const auto st = small_state(cfg, 0.0, 1);
        ResidualOptions ro;
        ro.source = ResidualSource::frozen_perturbation;
        const auto fr = full_residual(st, cfg, ro);
        const double expected = cfg.a * lp_norm(grad(st.q1), 2.0);
        Check c = check_le(s, "shallow_water_pressure_gap", std::abs(fr.momentum_abs - expected) / expected, 1e-8);
        if (!(fr.mass <= 1e-10)) {
            c.pass = false;
            c.detail = "mass residual " + sci(fr.mass);
        }
        return c;
    }));
    r.add(guarded(s, "reformulation_consistency", [&] {
        // d_t (h2, u2) from the perturbation system closes the full system up
        // to spectral truncation, which is negligible on this resolved state.
        const auto cfg = small_solver_config();
        const auto fr = full_residual(small_state(cfg, 0.05, 9, 128, 16.0, 8), cfg);
        return check_le(s, "reformulation_consistency", std::max(fr.mass, fr.momentum), 1e-8);
    }));
    r.add(guarded(s, "friction_full_residual", [&] {
        SolverConfig cfg = small_solver_config();
        cfg.mode = Mode::friction;
        cfg.mu = 1.0;
        cfg.Fr = 1.0;
        cfg.r_fric = 1.0;
        const auto st = small_state(cfg, 0.0, 1);
        const auto fr = full_residual(st, cfg);
        return check_le(s, "friction_full_residual", std::max(fr.mass, fr.momentum), 1e-8);
    }));
    r.add(guarded(s, "heat_only_mass_drift", [&] {
        auto cfg = small_solver_config();
        cfg.mode = Mode::heat_only;
        auto st = small_state(cfg, 0.0, 1);
        std::vector<double> m{total_mass(st)};
        for (int k = 0; k < 100; ++k) {
            st = step(st, cfg);
            m.push_back(total_mass(st));
        }
        return check_le(s, "heat_only_mass_drift", mass_drift(m), 1e-13);
    }));
    r.add(guarded(s, "scaling_l2", [&] {
        const auto cfg = small_solver_config();
        return check_le(s, "scaling_l2", scaling_check(scaling_state(cfg), cfg, 2), 1e-10);
    }));
    r.add(guarded(s, "scaling_negative_control", [&] {
        const auto cfg = small_solver_config();
        ScalingOptions o;
        o.adjust_pressure = false;
        return check_ge(s, "scaling_negative_control", scaling_check(scaling_state(cfg), cfg, 2, o), 1e-6);
    }));
    r.add(guarded(s, "dt_convergence_order", [&] {
        return check_band(s, "dt_convergence_order", dt_convergence_order(small_solver_config(), 1.0, 0.02), 1.0, 0.2);
    }));
    return r;
}

// ---------------------------------------------------------------- decay

struct DecayRunChecks {
    RunResult run;
    VerifyReport report;
};

/// Runs the configured simulation and checks the decay exponents, the
/// maximum principle, mass drift and the F_T growth bound.
inline DecayRunChecks verify_decay_run(const RunConfig& cfg) {
    const std::string s = "decay";
    DecayRunChecks out;
    out.run = run_simulation(cfg);
    const auto& run = out.run;
    auto& r = out.report;
    r.add(check_le(s, "no_blowup", run.status == RunStatus::completed ? 0.0 : 1.0, 0.0, run.message));
    try {
        for (const auto& rep : decay_reports(run.rows, cfg.grid, cfg.diagnostics)) {
            Check c = check_band(s, "exponent_" + rep.norm, rep.fitted, rep.expected, rep.tolerance * rep.expected);
            c.detail = "floor " + sci(rep.floor) + ", " + std::to_string(rep.samples) + " samples";
            r.add(c);
        }
    } catch (const std::exception& e) {
        Check c;
        c.suite = s;
        c.name = "decay_fit";
        c.value = std::nan("");
        c.detail = e.what();
        r.add(c);
    }
    const double mp = std::max(run.rho1_min0 - run.rho1_min, run.rho1_max - run.rho1_max0);
    r.add(check_le(s, "max_principle", mp, 1e-8));
    r.add(check_le(s, "mass_drift", run.max_mass_drift(), 1e-6));
    r.add(check_le(s, "ft_growth", run.max_ft_ratio(), 10.0, "max over T of ft_norm(T) / ft_norm(0)"));
    return out;
}

inline VerifyReport verify_decay(const RunConfig& cfg) { return verify_decay_run(cfg).report; }

inline VerifyReport verify_suite(const std::string& suite, const RunConfig& cfg) {
    VerifyReport r;
    const bool all = suite == "all";
    if (all || suite == "lp") r.append(verify_lp());
    if (all || suite == "besov") {
        r.append(verify_besov());
        r.append(verify_estimates());
    }
    if (all || suite == "paraproduct") r.append(verify_paraproduct());
    if (all || suite == "quasi") r.append(verify_quasi());
    if (all || suite == "solver") r.append(verify_solver());
    if (all || suite == "decay") r.append(verify_decay(cfg));
    if (!all && r.checks.empty()) throw ConfigError("unknown suite '" + suite + "'");
    return r;
}

}  // namespace qsw
