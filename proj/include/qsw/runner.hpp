#pragma once

// Run orchestration: builds the initial state from a RunConfig, steps it to
// t_end, records the diagnostic time series and writes the artifacts.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsw/besov.hpp"
#include "qsw/decay_fit.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/field_io.hpp"
#include "qsw/initial_data.hpp"
#include "qsw/perturbation_solver.hpp"
#include "qsw/run_config.hpp"

namespace qsw {

struct SeriesRow {
    double t = 0.0;
    double linf_rho_minus_1 = 0.0;
    double besov_u_m1_inf = 0.0;
    double mass = 0.0;
    double mass_drift = 0.0;
    double res_mass = 0.0;
    double res_mom = 0.0;
    double ft_norm = 0.0;
    double V_T = 0.0;
    double cfl = 0.0;
};

inline constexpr const char* csv_header = "t,linf_rho_minus_1,besov_u_m1_inf,mass,mass_drift,res_mass,res_mom,ft_norm,V_T,cfl";

enum class RunStatus { completed, blowup };

struct RunResult {
    RunStatus status = RunStatus::completed;
    std::string message;
    std::vector<SeriesRow> rows;
    /// Extremes of rho1 over every snapshot against its initial range.
    double rho1_min0 = 0.0, rho1_max0 = 0.0;
    double rho1_min = 0.0, rho1_max = 0.0;
    double ft_initial = 0.0;
    std::size_t steps = 0;
    double wall_seconds = 0.0;
    std::optional<SimState> final_state;

    bool max_principle(double tol = 1e-8) const {
        return rho1_min >= rho1_min0 - tol && rho1_max <= rho1_max0 + tol;
    }
    double max_mass_drift() const { return rows.empty() ? 0.0 : rows.back().mass_drift; }
    double max_ft_ratio() const {
        double m = 0.0;
        for (const auto& r : rows) m = std::max(m, ft_initial > 0.0 ? r.ft_norm / ft_initial : r.ft_norm);
        return m;
    }
};

/// Initial state: Gaussian q1, random (h2, u2) of size eps in B^{N/2-1}_{2,1}.
/// h2 draws from seed and u2 from seed + 1.
inline SimState initial_state(const RunConfig& c, const DyadicFilter& filter) {
    const Grid& g = filter.grid();
    GaussianBump bump;
    bump.amplitude = c.initial.bump_amplitude;
    bump.width = c.initial.bump_width;
    const auto q1 = gaussian_bump(g, bump);
    SpectralField h2 = SpectralField::zeros(g, 1);
    SpectralField u2 = SpectralField::zeros(g, g.dim());
    if (c.initial.eps > 0.0) {
        const BesovSpec norm{g.dim() / 2.0 - 1.0, 2.0, 1.0};
        RandomFieldSpec rs;
        rs.decay = c.initial.spectral_decay;
        rs.components = 1;
        h2 = random_with_besov_norm(filter, rs, norm, c.initial.eps, c.initial.seed);
        rs.components = g.dim();
        u2 = random_with_besov_norm(filter, rs, norm, c.initial.eps, c.initial.seed + 1);
    }
    return make_state(q1, h2, u2, c.solver);
}

/// Called after every recorded row with the current state.
using RowObserver = std::function<void(const SeriesRow&, const SimState&)>;

inline RunResult run_simulation(const RunConfig& c, bool write_dumps = false, const RowObserver& observer = {}) {
    c.validate();
    const auto wall0 = std::chrono::steady_clock::now();
    const Grid grid = c.grid.make();
    const DyadicFilter filter = build_dyadic_filter(grid);
    const auto& d = c.diagnostics;

    RunResult res;
    SimState s = initial_state(c, filter);
    FtAccumulator ft(filter, d.ft_p, c.solver.l0);
    GronwallAccumulator gron(filter, {d.gronwall_q, d.gronwall_q1, c.solver.l0});
    ResidualOptions ro;
    ro.pad = d.residual_pad;
    // The heat flow alone solves the pressureless system.
    ro.include_pressure = c.solver.mode != Mode::heat_only;

    res.rho1_min0 = 1.0 + *std::min_element(s.q1.values().begin(), s.q1.values().end());
    res.rho1_max0 = 1.0 + *std::max_element(s.q1.values().begin(), s.q1.values().end());
    res.rho1_min = res.rho1_min0;
    res.rho1_max = res.rho1_max0;
    const double mass0 = total_mass(s);
    double drift = 0.0;

    auto record = [&](const SimState& st) {
        SeriesRow r;
        r.t = st.t;
        const auto rc = recompose(st, c.solver);
        r.linf_rho_minus_1 = lp_norm(map_values(rc.rho, [](double x) { return x - 1.0; }), inf);
        r.besov_u_m1_inf = besov_minus1_infty(filter, rc.u);
        r.mass = total_mass(st);
        drift = std::max(drift, std::abs(r.mass - mass0) / std::abs(mass0));
        r.mass_drift = drift;
        const auto fr = full_residual(st, c.solver, ro);
        r.res_mass = fr.mass;
        r.res_mom = fr.momentum;
        ft.add(st.t, st.h2, st.u2);
        gron.add(snapshot(st));
        r.ft_norm = ft.value();
        r.V_T = gron.value();
        r.cfl = cfl_number(st, c.solver);
        for (double v : st.q1.values()) {
            res.rho1_min = std::min(res.rho1_min, 1.0 + v);
            res.rho1_max = std::max(res.rho1_max, 1.0 + v);
        }
        res.rows.push_back(r);
        if (observer) observer(r, st);
    };
    auto dump = [&](const SimState& st, long idx) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "%06ld", idx);
        const auto dir = std::filesystem::path(c.out_dir) / "fields";
        write_field(dir, std::string("q1_") + stem, st.q1, st.t);
        write_field(dir, std::string("h2_") + stem, st.h2, st.t);
        write_field(dir, std::string("u2_") + stem, st.u2, st.t);
    };

    const auto steps = static_cast<long>(std::llround(c.solver.t_end / c.solver.dt));
    const auto every = std::max(1L, static_cast<long>(std::llround(d.snapshot_every / c.solver.dt)));
    const long dump_every = d.dump_every > 0.0 ? std::max(1L, static_cast<long>(std::llround(d.dump_every / c.solver.dt))) : 0;
    record(s);
    res.ft_initial = res.rows.front().ft_norm;
    if (write_dumps && dump_every) dump(s, 0);
    try {
        for (long k = 1; k <= steps; ++k) {
            s = step(s, c.solver);
            ++res.steps;
            if (k % every == 0 || k == steps) record(s);
            if (write_dumps && dump_every && k % dump_every == 0) dump(s, k);
        }
    } catch (const BlowupError& e) {
        res.status = RunStatus::blowup;
        res.message = e.what();
        s = e.last_valid_state();
    } catch (const CflError& e) {
        res.status = RunStatus::blowup;
        res.message = e.what();
    } catch (const DensityFloorError& e) {
        res.status = RunStatus::blowup;
        res.message = e.what();
    }
    res.final_state = s;
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
}

inline std::string format_row(const SeriesRow& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t,
                  r.linf_rho_minus_1, r.besov_u_m1_inf, r.mass, r.mass_drift, r.res_mass, r.res_mom, r.ft_norm, r.V_T,
                  r.cfl);
    return buf;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<SeriesRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << csv_header << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
}

/// Reads a series written by write_csv.
inline std::vector<SeriesRow> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != csv_header) throw ConfigError("unexpected CSV header in " + path.string());
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        SeriesRow r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.linf_rho_minus_1,
                        &r.besov_u_m1_inf, &r.mass, &r.mass_drift, &r.res_mass, &r.res_mom, &r.ft_norm, &r.V_T,
                        &r.cfl) != 10) {
            throw ConfigError("malformed CSV row: " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

inline nlohmann::json to_json(const DecayReport& r) {
    return {{"norm", r.norm},         {"window", {r.window.t0, r.window.t1}},
            {"fitted", r.fitted},     {"expected", r.expected},
            {"relative_error", r.relative_error}, {"tolerance", r.tolerance},
            {"floor", r.floor},       {"samples", r.samples},
            {"pass", r.pass}};
}

/// Decay fits of the two series in a run: rho - 1 in L^inf against N/2 and
/// u in B^{-1}_{inf,inf} against N/2 + 1/2.
inline std::vector<DecayReport> decay_reports(const std::vector<SeriesRow>& rows, const GridConfig& grid,
                                              const DiagnosticsConfig& d) {
    if (rows.empty()) throw DiagnosticError("decay fit needs a non-empty series");
    std::vector<double> t, rho, u;
    for (const auto& r : rows) {
        t.push_back(r.t);
        rho.push_back(r.linf_rho_minus_1);
        u.push_back(r.besov_u_m1_inf);
    }
    FloorOptions fr, fu;
    if (d.floor == "asymptotic") {
        // rho tends to its conserved mean and u to a constant, which carries
        // no dyadic block.
        const double volume = std::pow(grid.period, grid.dim);
        fr.mode = FloorMode::fixed;
        fr.value = std::abs(rows.front().mass / volume - 1.0);
        fu.mode = FloorMode::fixed;
        fu.value = 0.0;
    } else if (d.floor == "none") {
        fr.mode = fu.mode = FloorMode::none;
    } else {
        fr.tail_start = fu.tail_start = d.tail_start;
    }
    const double N = grid.dim;
    return {fit_decay(t, rho, "linf_rho_minus_1", d.window, N / 2.0, d.rho_tolerance, fr),
            fit_decay(t, u, "besov_u_m1_inf", d.window, N / 2.0 + 0.5, d.u_tolerance, fu)};
}

inline nlohmann::json run_summary(const RunConfig& c, const RunResult& r) {
    nlohmann::json j;
    j["config"] = to_json(c);
    j["status"] = r.status == RunStatus::completed ? "completed" : "blowup";
    if (!r.message.empty()) j["message"] = r.message;
    j["steps"] = r.steps;
    j["wall_seconds"] = r.wall_seconds;
    j["rows"] = r.rows.size();
    if (!r.rows.empty()) {
        const auto& last = r.rows.back();
        j["final"] = {{"t", last.t},           {"linf_rho_minus_1", last.linf_rho_minus_1},
                      {"besov_u_m1_inf", last.besov_u_m1_inf}, {"res_mass", last.res_mass},
                      {"res_mom", last.res_mom}, {"ft_norm", last.ft_norm},
                      {"V_T", last.V_T}};
    }
    j["mass_drift"] = r.max_mass_drift();
    j["ft_initial"] = r.ft_initial;
    j["ft_max_ratio"] = r.max_ft_ratio();
    j["max_principle"] = {{"rho1_min0", r.rho1_min0}, {"rho1_max0", r.rho1_max0}, {"rho1_min", r.rho1_min},
                          {"rho1_max", r.rho1_max},   {"pass", r.max_principle()}};
    if (c.solver.mode != Mode::friction) {
        nlohmann::json fits = nlohmann::json::array();
        try {
            for (const auto& rep : decay_reports(r.rows, c.grid, c.diagnostics)) fits.push_back(to_json(rep));
        } catch (const std::exception& e) {
            fits.push_back({{"error", e.what()}});
        }
        j["decay"] = fits;
    }
    return j;
}

inline void write_artifacts(const RunConfig& c, const RunResult& r) {
    const std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    write_csv(dir / "series.csv", r.rows);
    std::ofstream out(dir / "summary.json");
    if (!out) throw ConfigError("cannot write summary in " + dir.string());
    out << run_summary(c, r).dump(2) << '\n';
}

}  // namespace qsw
