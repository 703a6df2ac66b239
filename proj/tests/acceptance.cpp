// Acceptance run: one pass/fail line per criterion. Criteria 5, 7, 8 and 9
// share one long simulation configured by configs/decay_512.json.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qsw/qsw.hpp"

using namespace qsw;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2d  %s  %-28s %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", name.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

/// Absolute momentum residual over |grad rho| for the friction system with
/// (h2, u2) = 0, at bump amplitude `amp`.
double friction_gap_ratio(double amp, const SolverConfig& cfg) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto q = SpectralField::sample(g, [amp](const Point& x) { return amp * std::sin(x[0]) * std::cos(x[1]); });
    const auto zero = SpectralField::zeros(g, 1);
    const auto st = make_state(q, zero, SpectralField::zeros(g, 2), cfg);
    ResidualOptions ro;
    ro.source = ResidualSource::frozen_perturbation;
    return full_residual(st, cfg, ro).momentum_abs / lp_norm(grad(st.q1), 2.0);
}

}  // namespace

int main() {
    set_warning_handler([](const std::string&) {});

    report(1, "dyadic partition", [] {
        const double p = std::max({partition_error(make_grid(1, 1024, two_pi)), partition_error(make_grid(2, 128, 64.0)),
                                   partition_error(make_grid(3, 32, two_pi))});
        const double r = std::max(reconstruction_error(make_grid(1, 512, two_pi), 10, 11),
                                  reconstruction_error(make_grid(2, 128, 10.0), 10, 21));
        return Outcome{p <= 1e-10 && r <= 1e-10, "partition " + sci(p) + ", reconstruction " + sci(r) + " (<= 1e-10)"};
    });

    report(2, "Bony identity", [] {
        const double e = bony_identity_error(128, 100, 1000);
        return Outcome{e <= 1e-12, "100 pairs at 128^2: " + sci(e) + " (<= 1e-12)"};
    });

    report(3, "quasi-solution identity", [] {
        const double r1 = quasi_residual_1d(1024);
        const double a = quasi_residual_2d(64), b = quasi_residual_2d(128), c = quasi_residual_2d(256);
        const bool pass = r1 <= 1e-8 && c <= 1e-6 && a / b >= 10.0 && b / c >= 10.0;
        return Outcome{pass, "1D " + sci(r1) + "; 2D 64/128/256 " + sci(a) + " " + sci(b) + " " + sci(c)};
    });

    report(4, "friction exactness", [] {
        const auto fr = friction_exact_residual(friction_state(), 1.0, 1.0);
        const double exact = std::max(fr.mass, fr.momentum);
        SolverConfig cfg;
        cfg.mode = Mode::friction;
        cfg.mu = 1.0;
        cfg.Fr = 1.0;
        cfg.r_fric = 0.5;
        // Uncertified: residual = |1/Fr^2 - r mu| |grad rho| at every amplitude.
        const double k1 = friction_gap_ratio(0.1, cfg), k2 = friction_gap_ratio(0.4, cfg);
        const double gap = std::abs(1.0 / (cfg.Fr * cfg.Fr) - cfg.r_fric * cfg.mu);
        const double prop = std::max(std::abs(k1 - gap), std::abs(k2 - gap)) / gap;
        return Outcome{exact <= 1e-8 && prop <= 1e-6,
                       "residual " + sci(exact) + " (<= 1e-8); control |R|/|grad rho| = " + sci(k1) + ", " + sci(k2) +
                           " vs " + sci(gap)};
    });

    // Shared long run.
    const RunConfig rc = load_run_config(std::string(QSW_SOURCE_DIR) + "/configs/decay_512.json");
    RunConfig run_cfg = rc;
    run_cfg.out_dir = "acceptance_decay";
    std::printf("long run: %d^%d, period %g, %s dt %g, t_end %g\n", run_cfg.grid.n, run_cfg.grid.dim,
                run_cfg.grid.period, to_string(run_cfg.solver.stepping), run_cfg.solver.dt, run_cfg.solver.t_end);
    std::fflush(stdout);
    RunResult run;
    bool run_ok = false;
    std::string run_error;
    try {
        run = run_simulation(run_cfg);
        write_artifacts(run_cfg, run);
        run_ok = true;
    } catch (const std::exception& e) {
        run_error = e.what();
    }
    auto need_run = [&] {
        if (!run_ok) throw DiagnosticError("long run failed: " + run_error);
    };
    const bool completed = run_ok && run.status == RunStatus::completed;

    report(5, "decay exponents", [&] {
        need_run();
        const auto reps = decay_reports(run.rows, run_cfg.grid, run_cfg.diagnostics);
        std::string d;
        bool pass = completed;
        for (const auto& r : reps) {
            pass = pass && r.pass;
            d += r.norm + " " + fmt("%.3f", r.fitted) + " vs " + fmt("%.2f", r.expected) + " +-" +
                 fmt("%.0f%%", 100.0 * r.tolerance) + "; ";
        }
        return Outcome{pass, d};
    });

    report(6, "heat kernel rates", [] {
        bool pass = true;
        double worst = 0.0;
        for (const auto& kc : kernel_cases()) {
            const auto fit = kernel_rate(kc);
            worst = std::max(worst, fit.relative_error);
            pass = pass && fit.relative_error <= 0.15;
        }
        return Outcome{pass, "worst relative error " + sci(worst) + " over 6 cases (<= 0.15)"};
    });

    report(7, "maximum principle", [&] {
        need_run();
        const double ex = std::max(run.rho1_min0 - run.rho1_min, run.rho1_max - run.rho1_max0);
        return Outcome{run.max_principle(1e-8), "rho1 in [" + sci(run.rho1_min) + ", " + sci(run.rho1_max) +
                                                    "], excursion " + sci(ex) + " (<= 1e-8)"};
    });

    report(8, "conservation and convergence", [&] {
        need_run();
        const double drift = run.max_mass_drift();
        const double order = dt_convergence_order(small_solver_config(), 1.0, 0.02);
        return Outcome{drift <= 1e-6 && std::abs(order - 1.0) <= 0.2,
                       "mass drift " + sci(drift) + " (<= 1e-6), dt order " + fmt("%.3f", order) + " (1 +- 0.2)"};
    });

    report(9, "small-data bound", [&] {
        need_run();
        const double g = run.max_ft_ratio();
        return Outcome{completed && g <= 10.0,
                       std::string(completed ? "no blowup" : "blowup: " + run.message) + ", max F_T(T)/F_T(0) = " +
                           fmt("%.3f", g) + " (<= 10)"};
    });

    report(10, "estimate constants", [] {
        const auto fresh = sweep_estimate_maxima(fresh_first_seed, fresh_seed_count);
        bool pass = true;
        double worst = 0.0;
        std::string name;
        for (const auto& [k, frozen] : frozen_estimate_maxima()) {
            const double q = fresh.at(k) / frozen;
            if (q > worst) {
                worst = q;
                name = k;
            }
            pass = pass && q <= estimate_margin;
        }
        return Outcome{pass, "worst fresh/frozen " + fmt("%.3f", worst) + " (" + name + ", <= 1.1)"};
    });

    report(11, "scaling equivariance", [] {
        const auto cfg = small_solver_config();
        const double e = scaling_check(scaling_state(cfg), cfg, 2);
        ScalingOptions o;
        o.adjust_pressure = false;
        const double n = scaling_check(scaling_state(cfg), cfg, 2, o);
        return Outcome{e <= 1e-10 && n > 1e-6, "l = 2: " + sci(e) + " (<= 1e-10), unadjusted control " + sci(n)};
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
