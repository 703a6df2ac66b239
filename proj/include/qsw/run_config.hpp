#pragma once

// Run configuration and its canonical JSON form. Unknown keys are rejected at
// every level so that typos never fall back silently to defaults.

#include <cstdint>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "qsw/decay_fit.hpp"
#include "qsw/error.hpp"
#include "qsw/grid.hpp"
#include "qsw/perturbation_solver.hpp"

namespace qsw {

struct GridConfig {
    int dim = 2;
    int n = 512;
    double period = 64.0;

    Grid make() const { return make_grid(dim, n, period); }
};

struct InitialConfig {
    double bump_amplitude = 0.5;
    double bump_width = 1.0;
    /// Size of (h2, u2) at t = 0, measured in B^{N/2-1}_{2,1}.
    double eps = 1e-3;
    std::uint64_t seed = 1;
    /// Spectral decay exponent of the random perturbation.
    double spectral_decay = 1.0;
};

struct DiagnosticsConfig {
    /// Time between CSV rows.
    double snapshot_every = 0.5;
    /// Time between field dumps; 0 disables them.
    double dump_every = 0.0;
    /// Lebesgue index p of the high-frequency part of the F_T norm.
    double ft_p = 2.0;
    /// Indices (q, q1) of the hybrid norms in V(T).
    double gronwall_q = 2.0;
    double gronwall_q1 = 2.0;
    /// Padding factor of the residual evaluation grid.
    int residual_pad = 2;
    /// Decay fit window and plateau handling.
    DecayWindow window{2.0, 20.0};
    /// "asymptotic": the exact long-time limit on the torus (|mean rho - 1|
    /// for rho, 0 for u); "tail_mean": mean of the samples from tail_start on
    /// (after the window when negative); "none".
    std::string floor = "asymptotic";
    double tail_start = -1.0;
    double rho_tolerance = 0.15;
    double u_tolerance = 0.20;
};

struct RunConfig {
    GridConfig grid;
    SolverConfig solver;
    InitialConfig initial;
    DiagnosticsConfig diagnostics;
    std::string out_dir = "qsw_out";
    std::string suite = "all";

    RunConfig() { solver.t_end = 20.0; }

    void validate() const {
        (void)grid.make();
        solver.validate();
        if (!(initial.bump_width > 0.0)) throw ConfigError("bump_width must be positive");
        if (!(initial.bump_amplitude > -1.0)) throw ConfigError("bump_amplitude must exceed -1 (density floor)");
        if (!(initial.eps >= 0.0)) throw ConfigError("eps must be >= 0");
        if (!(diagnostics.snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
        if (!(diagnostics.dump_every >= 0.0)) throw ConfigError("dump_every must be >= 0");
        if (!(diagnostics.ft_p >= 1.0)) throw ConfigError("ft_p must be >= 1");
        if (diagnostics.residual_pad < 1) throw ConfigError("residual_pad must be >= 1");
        if (diagnostics.floor != "asymptotic" && diagnostics.floor != "tail_mean" && diagnostics.floor != "none") {
            throw ConfigError("floor must be asymptotic, tail_mean or none");
        }
        static const std::set<std::string> suites{"lp", "besov", "paraproduct", "quasi", "solver", "decay", "all"};
        if (!suites.count(suite)) throw ConfigError("unknown suite '" + suite + "'");
    }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

template <class T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(std::string("bad value for '") + key + "'");
    }
}

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"dim", c.grid.dim}, {"n", c.grid.n}, {"period", c.grid.period}};
    const auto& s = c.solver;
    j["solver"] = {{"mu", s.mu},
                   {"a", s.a},
                   {"Fr", s.Fr},
                   {"r_fric", s.r_fric},
                   {"mode", to_string(s.mode)},
                   {"dt", s.dt},
                   {"t_end", s.t_end},
                   {"dealias", s.dealias},
                   {"cfl_max", s.cfl_max},
                   {"l0", s.l0},
                   {"stepping", to_string(s.stepping)},
                   {"forcing", s.forcing},
                   {"floor", s.floor}};
    const auto& i = c.initial;
    j["initial"] = {{"bump_amplitude", i.bump_amplitude},
                    {"bump_width", i.bump_width},
                    {"eps", i.eps},
                    {"seed", i.seed},
                    {"spectral_decay", i.spectral_decay}};
    const auto& d = c.diagnostics;
    j["diagnostics"] = {{"snapshot_every", d.snapshot_every}, {"dump_every", d.dump_every},
                        {"ft_p", d.ft_p},                     {"gronwall_q", d.gronwall_q},
                        {"gronwall_q1", d.gronwall_q1},       {"residual_pad", d.residual_pad},
                        {"window", {d.window.t0, d.window.t1}}, {"floor", d.floor},
                        {"tail_start", d.tail_start},
                        {"rho_tolerance", d.rho_tolerance},   {"u_tolerance", d.u_tolerance}};
    j["out_dir"] = c.out_dir;
    j["suite"] = c.suite;
    return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    using detail::read_key;
    detail::reject_unknown(j, {"grid", "solver", "initial", "diagnostics", "out_dir", "suite"}, "config");
    RunConfig c;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        detail::reject_unknown(g, {"dim", "n", "period"}, "grid");
        read_key(g, "dim", c.grid.dim);
        read_key(g, "n", c.grid.n);
        read_key(g, "period", c.grid.period);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        detail::reject_unknown(s, {"mu", "a", "Fr", "r_fric", "mode", "dt", "t_end", "dealias", "cfl_max", "l0",
                                   "stepping", "forcing", "floor"},
                               "solver");
        read_key(s, "mu", c.solver.mu);
        read_key(s, "a", c.solver.a);
        read_key(s, "Fr", c.solver.Fr);
        read_key(s, "r_fric", c.solver.r_fric);
        if (s.contains("mode")) c.solver.mode = parse_mode(s["mode"].get<std::string>());
        read_key(s, "dt", c.solver.dt);
        read_key(s, "t_end", c.solver.t_end);
        read_key(s, "dealias", c.solver.dealias);
        read_key(s, "cfl_max", c.solver.cfl_max);
        read_key(s, "l0", c.solver.l0);
        if (s.contains("stepping")) c.solver.stepping = parse_stepping(s["stepping"].get<std::string>());
        read_key(s, "forcing", c.solver.forcing);
        read_key(s, "floor", c.solver.floor);
    }
    if (j.contains("initial")) {
        const auto& i = j["initial"];
        detail::reject_unknown(i, {"bump_amplitude", "bump_width", "eps", "seed", "spectral_decay"}, "initial");
        read_key(i, "bump_amplitude", c.initial.bump_amplitude);
        read_key(i, "bump_width", c.initial.bump_width);
        read_key(i, "eps", c.initial.eps);
        read_key(i, "seed", c.initial.seed);
        read_key(i, "spectral_decay", c.initial.spectral_decay);
    }
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        detail::reject_unknown(d, {"snapshot_every", "dump_every", "ft_p", "gronwall_q", "gronwall_q1", "residual_pad",
                                   "window", "floor", "tail_start", "rho_tolerance", "u_tolerance"},
                               "diagnostics");
        read_key(d, "snapshot_every", c.diagnostics.snapshot_every);
        read_key(d, "dump_every", c.diagnostics.dump_every);
        read_key(d, "ft_p", c.diagnostics.ft_p);
        read_key(d, "gronwall_q", c.diagnostics.gronwall_q);
        read_key(d, "gronwall_q1", c.diagnostics.gronwall_q1);
        read_key(d, "residual_pad", c.diagnostics.residual_pad);
        if (d.contains("window")) {
            const auto& w = d["window"];
            if (!w.is_array() || w.size() != 2) throw ConfigError("window must be [t0, t1]");
            c.diagnostics.window = {w[0].get<double>(), w[1].get<double>()};
        }
        read_key(d, "floor", c.diagnostics.floor);
        read_key(d, "tail_start", c.diagnostics.tail_start);
        read_key(d, "rho_tolerance", c.diagnostics.rho_tolerance);
        read_key(d, "u_tolerance", c.diagnostics.u_tolerance);
    }
    read_key(j, "out_dir", c.out_dir);
    read_key(j, "suite", c.suite);
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return run_config_from_json(j);
}

}  // namespace qsw
