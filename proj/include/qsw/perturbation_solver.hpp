#pragma once

// Time integration of the perturbation system for (h2, u2) around the exact
// quasi-solution (rho1, u1 = -mu grad ln rho1), with rho = rho1 exp(h2) and
// u = u1 + u2.
//
// With the affine pressure P = a rho, dividing the momentum equation by rho
// and subtracting the pressureless equation solved by (rho1, u1) gives
//
//   d_t h2 = -u.grad h2 - div u2 - u2.grad ln rho1
//   d_t u2 = mu div D(u2) - u.grad u2 - a grad h2 - u2.grad u1
//            + mu grad ln rho1 . D(u2) - a grad ln rho1
//            + mu grad h2 . D(u1) + mu grad h2 . D(u2)
//
// where (g . T)_i = sum_j g_j T_{ji} and mu div D(u2) = (mu/2)(Lap u2 + grad div u2).
// In friction mode the pressure coefficient is 1/Fr^2 and the forcing becomes
// -(1/Fr^2) grad ln rho1 - r u1, which vanishes when r mu Fr^2 = 1; the drag
// -r u2 joins the implicit part.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qsw/besov.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/error.hpp"
#include "qsw/field.hpp"
#include "qsw/quasi_solution.hpp"
#include "qsw/spectral_ops.hpp"
#include "qsw/warnings.hpp"

namespace qsw {

enum class Mode { shallow_water, friction, heat_only };
enum class Stepping { imex_euler, heun };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::shallow_water: return "shallow_water";
        case Mode::friction: return "friction";
        case Mode::heat_only: return "heat_only";
    }
    return "?";
}

inline Mode parse_mode(const std::string& s) {
    if (s == "shallow_water") return Mode::shallow_water;
    if (s == "friction") return Mode::friction;
    if (s == "heat_only") return Mode::heat_only;
    throw ConfigError("unknown mode '" + s + "'");
}

inline const char* to_string(Stepping s) { return s == Stepping::heun ? "heun" : "imex_euler"; }

inline Stepping parse_stepping(const std::string& s) {
    if (s == "imex_euler") return Stepping::imex_euler;
    if (s == "heun") return Stepping::heun;
    throw ConfigError("unknown stepping '" + s + "'");
}

struct SolverConfig {
    double mu = 0.1;
    double a = 1.0;
    double Fr = 1.0;
    double r_fric = 0.0;
    Mode mode = Mode::shallow_water;
    double dt = 0.01;
    double t_end = 1.0;
    double dealias = 2.0 / 3.0;
    double cfl_max = 0.4;
    int l0 = 0;
    Stepping stepping = Stepping::imex_euler;
    /// The -a grad ln rho1 forcing (friction: -(1/Fr^2) grad ln rho1 - r u1).
    bool forcing = true;
    /// Every explicit coupling; off leaves pure implicit diffusion.
    bool explicit_terms = true;
    double floor = default_density_floor;
    /// |h2| beyond which a step counts as a blowup.
    double blowup_threshold = 50.0;

    void validate() const {
        if (!(mu > 0.0)) throw ConfigError("mu must be positive");
        if (!(a > 0.0)) throw ConfigError("pressure coefficient a must be positive");
        if (!(Fr > 0.0)) throw ConfigError("Froude number must be positive");
        if (!(r_fric >= 0.0)) throw ConfigError("friction coefficient must be >= 0");
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
        if (!(t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
        if (!(dealias > 0.0 && dealias <= 1.0)) throw ConfigError("dealias fraction must lie in (0, 1]");
        if (!(cfl_max > 0.0)) throw ConfigError("cfl_max must be positive");
        if (!(floor > 0.0)) throw ConfigError("density floor must be positive");
    }

    /// r mu Fr^2 = 1: the friction system is solved exactly by the quasi-solution.
    bool friction_certified() const { return std::abs(r_fric * mu * Fr * Fr - 1.0) <= 1e-12; }

    double pressure_coefficient() const { return mode == Mode::friction ? 1.0 / (Fr * Fr) : a; }
    double drag() const { return mode == Mode::friction ? r_fric : 0.0; }
};

struct SimState {
    double t = 0.0;
    SpectralField q1;
    SpectralField h2;
    SpectralField u2;
    /// u1 = -mu grad ln rho1 at the current t (ln rho1 on the dealiased band).
    SpectralField u1_cache;
    /// grad ln rho1 at the current t.
    SpectralField grad_log_rho1;
    /// q1 at time t_origin; q1(t) is the exact heat semigroup applied to it.
    std::shared_ptr<const SpectralField> q1_origin;
    double t_origin = 0.0;

    const Grid& grid() const { return q1.grid(); }
};

/// Recomputes q1(t), ln rho1 and u1 from the exact heat flow. The heat flow
/// only shrinks the truncation tail of ln rho1, so checking it once suffices.
inline void refresh_quasi(SimState& s, const SolverConfig& cfg, bool check_truncation = false) {
    if (s.q1_origin) s.q1 = s.t == s.t_origin ? *s.q1_origin : heat_multiplier(*s.q1_origin, cfg.mu, s.t - s.t_origin);
    VelocityOptions vo;
    vo.fraction = cfg.dealias;
    vo.floor = cfg.floor;
    vo.warn_truncation = check_truncation;
    s.grad_log_rho1 = grad(log_density(s.q1, vo));
    s.u1_cache = -cfg.mu * s.grad_log_rho1;
}

/// Builds a state at time t; h2 and u2 are projected on the dealiased band.
inline SimState make_state(const SpectralField& q1, const SpectralField& h2, const SpectralField& u2,
                           const SolverConfig& cfg, double t = 0.0) {
    cfg.validate();
    if (q1.components() != 1 || h2.components() != 1) throw ShapeError("q1 and h2 must be scalar fields");
    if (u2.components() != q1.grid().dim()) throw ShapeError("u2 must have dim components");
    if (h2.grid() != q1.grid() || u2.grid() != q1.grid()) throw ShapeError("state fields live on different grids");
    SimState s;
    s.t = t;
    s.t_origin = t;
    s.q1_origin = std::make_shared<const SpectralField>(q1);
    s.q1 = q1;
    s.h2 = dealias(h2, cfg.dealias);
    s.u2 = dealias(u2, cfg.dealias);
    refresh_quasi(s, cfg, true);
    if (cfg.mode == Mode::friction && !cfg.friction_certified()) {
        warn("friction mode without r mu Fr^2 = 1: the quasi-solution is not exact");
    }
    return s;
}

struct NamedTerm {
    std::string name;
    SpectralField field;
};

struct RhsTerms {
    SpectralField h2_rhs;
    SpectralField u2_rhs;
    /// Individual couplings; empty unless requested.
    std::vector<NamedTerm> h2_terms;
    std::vector<NamedTerm> u2_terms;

    /// L2 norms of the recorded terms, keyed "h2.<name>" and "u2.<name>".
    std::map<std::string, double> norms() const {
        std::map<std::string, double> out;
        for (const auto& t : h2_terms) out["h2." + t.name] = lp_norm(t.field, 2.0);
        for (const auto& t : u2_terms) out["u2." + t.name] = lp_norm(t.field, 2.0);
        return out;
    }
};

namespace detail {

/// Samples of d_j f_c for every component c and axis j, stored at c*dim + j.
inline std::vector<RealBuffer> derivative_values(const SpectralField& f) {
    const int d = f.grid().dim();
    std::vector<RealBuffer> out;
    out.reserve(static_cast<std::size_t>(f.components() * d));
    for (int c = 0; c < f.components(); ++c) {
        for (int j = 0; j < d; ++j) out.push_back(inverse_fft(f.grid(), derivative_coeffs(f.grid(), f.coeffs(c), j)));
    }
    return out;
}

using Samples = std::vector<RealBuffer>;

inline Samples zero_samples(const Grid& g, int comps) { return Samples(static_cast<std::size_t>(comps), RealBuffer(g.points(), 0.0)); }

/// Dealiased field from pointwise samples.
inline SpectralField from_samples(const Grid& g, Samples s, double fraction) {
    return dealias(SpectralField::from_values(g, std::move(s)), fraction);
}

}  // namespace detail

/// Explicit right-hand sides. The implicit viscous part mu div D(u2) and the
/// friction drag are excluded; every product is dealiased.
inline RhsTerms assemble_rhs(const SimState& s, const SolverConfig& cfg, bool record_terms = false) {
    const Grid& g = s.grid();
    const int d = g.dim();
    const std::size_t dd = static_cast<std::size_t>(d);
    const std::size_t np = g.points();
    RhsTerms out;
    if (cfg.mode == Mode::heat_only || !cfg.explicit_terms) {
        out.h2_rhs = SpectralField::zeros(g, 1);
        out.u2_rhs = SpectralField::zeros(g, d);
        return out;
    }
    check_density_floor(s.q1, cfg.floor);
    const double mu = cfg.mu;
    const double A = cfg.pressure_coefficient();

    const auto& u1 = s.u1_cache;
    const auto& u2 = s.u2;
    const auto& gl = s.grad_log_rho1;
    const auto gh = detail::derivative_values(s.h2);
    const auto gu2 = detail::derivative_values(u2);
    const auto gu1 = detail::derivative_values(u1);

    // Pointwise couplings, one sample set per named term.
    auto h_transport = detail::zero_samples(g, 1);
    auto h_log = detail::zero_samples(g, 1);
    auto u_transport = detail::zero_samples(g, d);
    auto u_stretch = detail::zero_samples(g, d);
    auto u_visc_log = detail::zero_samples(g, d);
    auto u_visc_h_u1 = detail::zero_samples(g, d);
    auto u_visc_h_u2 = detail::zero_samples(g, d);

    for (std::size_t i = 0; i < np; ++i) {
        double ht = 0.0;
        double hl = 0.0;
        for (std::size_t j = 0; j < dd; ++j) {
            const double uj = u1.values(static_cast<int>(j))[i] + u2.values(static_cast<int>(j))[i];
            ht -= uj * gh[j][i];
            hl -= u2.values(static_cast<int>(j))[i] * gl.values(static_cast<int>(j))[i];
        }
        h_transport[0][i] = ht;
        h_log[0][i] = hl;
        for (std::size_t c = 0; c < dd; ++c) {
            double tr = 0.0, st = 0.0, vl = 0.0, v1 = 0.0, v2 = 0.0;
            for (std::size_t j = 0; j < dd; ++j) {
                const int jj = static_cast<int>(j);
                const double uj = u1.values(jj)[i] + u2.values(jj)[i];
                tr -= uj * gu2[c * dd + j][i];
                st -= u2.values(jj)[i] * gu1[c * dd + j][i];
                // (g . D w)_c = sum_j g_j D_{jc}, D_{jc} = (d_c w_j + d_j w_c) / 2
                const double D2 = 0.5 * (gu2[j * dd + c][i] + gu2[c * dd + j][i]);
                const double D1 = 0.5 * (gu1[j * dd + c][i] + gu1[c * dd + j][i]);
                vl += gl.values(jj)[i] * D2;
                v1 += gh[j][i] * D1;
                v2 += gh[j][i] * D2;
            }
            u_transport[c][i] = tr;
            u_stretch[c][i] = st;
            u_visc_log[c][i] = mu * vl;
            u_visc_h_u1[c][i] = mu * v1;
            u_visc_h_u2[c][i] = mu * v2;
        }
    }

    // Spectral terms: already on the dealiased band.
    const auto h_div = -div(u2);
    const auto u_pressure = -A * grad(s.h2);
    SpectralField u_forcing = SpectralField::zeros(g, d);
    if (cfg.forcing) {
        u_forcing = -A * gl;
        if (cfg.mode == Mode::friction) u_forcing.axpy(-cfg.r_fric, u1);
    }

    const double f = cfg.dealias;
    if (record_terms) {
        out.h2_terms.push_back({"transport", detail::from_samples(g, h_transport, f)});
        out.h2_terms.push_back({"divergence", h_div});
        out.h2_terms.push_back({"log_coupling", detail::from_samples(g, h_log, f)});
        out.u2_terms.push_back({"transport", detail::from_samples(g, u_transport, f)});
        out.u2_terms.push_back({"pressure", u_pressure});
        out.u2_terms.push_back({"stretch", detail::from_samples(g, u_stretch, f)});
        out.u2_terms.push_back({"visc_log", detail::from_samples(g, u_visc_log, f)});
        out.u2_terms.push_back({"forcing", u_forcing});
        out.u2_terms.push_back({"visc_h_u1", detail::from_samples(g, u_visc_h_u1, f)});
        out.u2_terms.push_back({"visc_h_u2", detail::from_samples(g, u_visc_h_u2, f)});
    }

    for (std::size_t i = 0; i < np; ++i) h_transport[0][i] += h_log[0][i];
    for (std::size_t c = 0; c < dd; ++c) {
        for (std::size_t i = 0; i < np; ++i) {
            u_transport[c][i] += u_stretch[c][i] + u_visc_log[c][i] + u_visc_h_u1[c][i] + u_visc_h_u2[c][i];
        }
    }
    out.h2_rhs = detail::from_samples(g, std::move(h_transport), f) + h_div;
    out.u2_rhs = detail::from_samples(g, std::move(u_transport), f) + u_pressure + u_forcing;
    return out;
}

/// mu div D(u) - r u, the linear operator treated implicitly.
inline SpectralField implicit_operator(const SpectralField& u, const SolverConfig& cfg) {
    auto out = cfg.mu * div_tensor(sym_grad(u));
    if (cfg.drag() != 0.0) out.axpy(-cfg.drag(), u);
    return out;
}

namespace detail {

/// Solves (I + theta dt L) u_new = (I - (1 - theta) dt L) u + dt F per mode,
/// where L = -(mu div D - r) has eigenvalue mu|xi|^2 + r on the
/// irrotational direction and mu|xi|^2/2 + r on the solenoidal ones.
inline SpectralField viscous_solve(const SpectralField& u, const SpectralField& F, double dt, double theta,
                                   const SolverConfig& cfg) {
    const Grid& g = u.grid();
    const auto& t = g.mode_table();
    const std::size_t d = static_cast<std::size_t>(g.dim());
    const double r = cfg.drag();
    std::vector<ComplexBuffer> out(d, ComplexBuffer(t.count));
    std::vector<cplx> uv(d), fv(d);
    for (std::size_t m = 0; m < t.count; ++m) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < d; ++a) k2 += t.xi_d[m * d + a] * t.xi_d[m * d + a];
        for (std::size_t a = 0; a < d; ++a) {
            uv[a] = u.coeffs(static_cast<int>(a))[m];
            fv[a] = F.coeffs(static_cast<int>(a))[m];
        }
        const double lam_par = cfg.mu * k2 + r;
        const double lam_perp = 0.5 * cfg.mu * k2 + r;
        auto advance = [&](cplx x, cplx f, double lam) {
            return ((1.0 - (1.0 - theta) * dt * lam) * x + dt * f) / (1.0 + theta * dt * lam);
        };
        if (k2 == 0.0) {
            for (std::size_t a = 0; a < d; ++a) out[a][m] = advance(uv[a], fv[a], r);
            continue;
        }
        cplx up{}, fp{};
        for (std::size_t a = 0; a < d; ++a) {
            up += t.xi_d[m * d + a] * uv[a];
            fp += t.xi_d[m * d + a] * fv[a];
        }
        up /= k2;
        fp /= k2;
        const cplx up_new = advance(up, fp, lam_par);
        for (std::size_t a = 0; a < d; ++a) {
            const double xa = t.xi_d[m * d + a];
            const cplx perp_new = advance(uv[a] - xa * up, fv[a] - xa * fp, lam_perp);
            out[a][m] = perp_new + xa * up_new;
        }
    }
    return SpectralField::from_coeffs(g, std::move(out));
}

}  // namespace detail

/// Advective CFL number max|u| dt max_i(n / period_i) with u = u1 + u2.
inline double cfl_number(const SimState& s, const SolverConfig& cfg) {
    const Grid& g = s.grid();
    double umax = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        double m2 = 0.0;
        for (int c = 0; c < g.dim(); ++c) {
            const double v = s.u1_cache.values(c)[i] + s.u2.values(c)[i];
            m2 += v * v;
        }
        umax = std::max(umax, m2);
    }
    double inv_dx = 0.0;
    for (int a = 0; a < g.dim(); ++a) inv_dx = std::max(inv_dx, g.n() / g.period(a));
    return std::sqrt(umax) * cfg.dt * inv_dx;
}

/// Raised when a step produces non-finite or runaway values; carries the
/// last state that was still valid.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& msg, SimState last) : std::runtime_error(msg), last_(std::move(last)) {}
    const SimState& last_valid_state() const { return last_; }

private:
    SimState last_;
};

namespace detail {

inline SimState euler_substep(const SimState& s, const RhsTerms& rhs, const SolverConfig& cfg) {
    SimState n = s;
    n.t = s.t + cfg.dt;
    n.h2 = s.h2 + cfg.dt * rhs.h2_rhs;
    n.u2 = viscous_solve(s.u2, rhs.u2_rhs, cfg.dt, 1.0, cfg);
    refresh_quasi(n, cfg);
    return n;
}

inline void check_blowup(const SimState& before, const SimState& after, const SolverConfig& cfg) {
    if (!after.h2.all_finite() || !after.u2.all_finite()) {
        throw BlowupError("non-finite values at t = " + std::to_string(after.t), before);
    }
    if (after.h2.max_abs() > cfg.blowup_threshold) {
        throw BlowupError("h2 exceeded the blowup threshold at t = " + std::to_string(after.t), before);
    }
}

}  // namespace detail

/// One step: IMEX Euler (explicit couplings, implicit viscosity and drag) or
/// Heun on the explicit part with Crank-Nicolson viscosity. q1 follows its
/// exact semigroup and u1 is refreshed from it.
inline SimState step(const SimState& s, const SolverConfig& cfg) {
    const double cfl = cfl_number(s, cfg);
    if (cfl > cfg.cfl_max) {
        throw CflError("advective CFL " + std::to_string(cfl) + " exceeds cap " + std::to_string(cfg.cfl_max));
    }
    SimState n;
    if (cfg.mode == Mode::heat_only) {
        n = s;
        n.t = s.t + cfg.dt;
        refresh_quasi(n, cfg);
        return n;
    }
    const auto r0 = assemble_rhs(s, cfg);
    if (cfg.stepping == Stepping::imex_euler) {
        n = detail::euler_substep(s, r0, cfg);
    } else {
        const SimState pred = detail::euler_substep(s, r0, cfg);
        detail::check_blowup(s, pred, cfg);
        const auto r1 = assemble_rhs(pred, cfg);
        n = pred;
        n.h2 = s.h2 + (0.5 * cfg.dt) * (r0.h2_rhs + r1.h2_rhs);
        n.u2 = detail::viscous_solve(s.u2, 0.5 * (r0.u2_rhs + r1.u2_rhs), cfg.dt, 0.5, cfg);
    }
    detail::check_blowup(s, n, cfg);
    return n;
}

struct Recomposed {
    SpectralField rho;
    SpectralField u;
};

/// rho = rho1 exp(h2) and u = u1 + u2; rho is projected on the dealiased band
/// unless band_limit is false.
inline Recomposed recompose(const SimState& s, const SolverConfig& cfg, bool band_limit = true) {
    check_density_floor(s.q1, cfg.floor);
    const Grid& g = s.grid();
    RealBuffer rho(g.points());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = (1.0 + s.q1.values()[i]) * std::exp(s.h2.values()[i]);
    auto rf = SpectralField::from_values(g, std::move(rho));
    if (band_limit) rf = dealias(rf, cfg.dealias);
    return {std::move(rf), s.u1_cache + s.u2};
}

/// Total mass: the grid quadrature of rho1 exp(h2).
inline double total_mass(const SimState& s) {
    const Grid& g = s.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) acc += (1.0 + s.q1.values()[i]) * std::exp(s.h2.values()[i]);
    return g.volume() * acc / static_cast<double>(g.points());
}

/// Largest relative deviation of a mass series from its first entry.
inline double mass_drift(const std::vector<double>& masses) {
    if (masses.size() < 2) throw DiagnosticError("mass drift needs at least two samples");
    double worst = 0.0;
    for (double m : masses) worst = std::max(worst, std::abs(m - masses.front()));
    return masses.front() != 0.0 ? worst / std::abs(masses.front()) : worst;
}

/// Where the residual takes d_t h2 and d_t u2 from.
enum class ResidualSource {
    /// The perturbation system itself (explicit part plus implicit operator).
    perturbation_system,
    /// h2 and u2 held fixed: only the heat flow of rho1 moves.
    frozen_perturbation,
};

struct ResidualOptions {
    ResidualSource source = ResidualSource::perturbation_system;
    int pad = 2;
    /// Include the pressure (friction: pressure and drag) terms.
    bool include_pressure = true;
};

struct ResidualFields {
    SpectralField mass;
    SpectralField momentum;
    double mass_scale = 0.0;
    double momentum_scale = 0.0;
};

struct FullResidual {
    double mass = 0.0;
    double momentum = 0.0;
    double mass_abs = 0.0;
    double momentum_abs = 0.0;
};

namespace detail {

/// Residual fields of the full system for the recomposed state, evaluated
/// pointwise on a padded grid with time derivatives substituted analytically.
inline ResidualFields residual_fields(const SimState& s, const SolverConfig& cfg, const ResidualOptions& opt) {
    const Grid gp = padded_grid(s.grid(), opt.pad);
    const double mu = cfg.mu;
    const SpectralField q = resample(s.q1, gp);
    check_density_floor(q, cfg.floor);
    const SpectralField h = resample(s.h2, gp);
    const SpectralField u2 = resample(s.u2, gp);

    SpectralField h_t = SpectralField::zeros(gp, 1);
    SpectralField u2_t = SpectralField::zeros(gp, gp.dim());
    if (opt.source == ResidualSource::perturbation_system && cfg.mode != Mode::heat_only) {
        const auto rhs = assemble_rhs(s, cfg);
        h_t = resample(rhs.h2_rhs, gp);
        u2_t = resample(rhs.u2_rhs + implicit_operator(s.u2, cfg), gp);
    }

    const auto rho1 = map_values(q, [](double x) { return 1.0 + x; });
    const auto inv_rho1 = map_values(rho1, [](double x) { return 1.0 / x; });
    const auto eh = map_values(h, [](double x) { return std::exp(x); });
    const auto rho = multiply(rho1, eh);
    const auto u1 = multiply(inv_rho1, grad(q)) * (-mu);
    const auto u = u1 + u2;
    const auto rho1_t = heat_rate(q, mu);
    const auto u1_t = -mu * grad(multiply(rho1_t, inv_rho1));
    const auto rho_t = multiply(rho1_t, eh) + multiply(rho, h_t);

    ResidualFields out;
    const auto rho_u = multiply(rho, u);
    const auto div_flux = div(rho_u);
    out.mass = rho_t + div_flux;
    out.mass_scale = lp_norm(rho_t, 2.0) + lp_norm(div_flux, 2.0);

    const auto d_rho_u = multiply(rho_t, u) + multiply(rho, u1_t + u2_t);
    const auto convect = div_tensor(multiply(rho, outer(u, u)));
    const auto visc = div_tensor(mu * multiply(rho, sym_grad(u)));
    out.momentum = d_rho_u + convect - visc;
    out.momentum_scale = lp_norm(d_rho_u, 2.0) + lp_norm(convect, 2.0) + lp_norm(visc, 2.0);
    if (opt.include_pressure) {
        const auto pressure = cfg.pressure_coefficient() * grad(rho);
        out.momentum += pressure;
        out.momentum_scale += lp_norm(pressure, 2.0);
        if (cfg.mode == Mode::friction) {
            const auto drag = cfg.r_fric * rho_u;
            out.momentum += drag;
            out.momentum_scale += lp_norm(drag, 2.0);
        }
    }
    return out;
}

}  // namespace detail

/// Relative L2 residuals of the full system (mass, momentum) at the
/// recomposed state. Each is divided by the summed L2 norms of the terms of
/// its equation; the absolute norms are reported alongside.
inline FullResidual full_residual(const SimState& s, const SolverConfig& cfg, const ResidualOptions& opt = {}) {
    const auto f = detail::residual_fields(s, cfg, opt);
    FullResidual r;
    r.mass_abs = lp_norm(f.mass, 2.0);
    r.momentum_abs = lp_norm(f.momentum, 2.0);
    r.mass = detail::relative(r.mass_abs, f.mass_scale);
    r.momentum = detail::relative(r.momentum_abs, f.momentum_scale);
    return r;
}

/// f(x) -> f(l x) by the sample map j -> l j mod n, exact for any samples.
inline SpectralField dilate(const SpectralField& f, int l) {
    const Grid& g = f.grid();
    const int n = g.n();
    const int d = g.dim();
    std::vector<RealBuffer> out(static_cast<std::size_t>(f.components()), RealBuffer(g.points()));
    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t p = 0; p < g.points(); ++p) {
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) src = src * static_cast<std::size_t>(n) + static_cast<std::size_t>((l * idx[static_cast<std::size_t>(a)]) % n);
        for (int c = 0; c < f.components(); ++c) out[static_cast<std::size_t>(c)][p] = f.values(c)[src];
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < n) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return SpectralField::from_values(g, std::move(out));
}

struct ScalingOptions {
    bool include_pressure = true;
    /// Scale the pressure (and drag) coefficients by l^2 as the scaling requires.
    bool adjust_pressure = true;
    int pad = 2;
};

/// Equivariance of the full residual under (rho, u)(t, x) -> (rho, l u)(l^2 t, l x).
/// Returns the larger of the mass and momentum discrepancies between the
/// residual of the dilated state and the rescaled residual (l^2 for mass,
/// l^3 for momentum), relative to the term scales of the dilated state.
inline double scaling_check(const SimState& s, const SolverConfig& cfg, int l, const ScalingOptions& opt = {}) {
    if (l < 1 || (l & (l - 1)) != 0 || l >= s.grid().n()) throw ConfigError("scaling factor must be a power of two below n");
    const int limit = s.grid().dealias_cutoff(cfg.dealias) / l;
    const auto& t = s.grid().mode_table();
    const std::size_t d = static_cast<std::size_t>(s.grid().dim());
    for (const SpectralField* f : {&s.q1, &s.h2, &s.u2}) {
        double peak = 0.0, outside = 0.0;
        for (int c = 0; c < f->components(); ++c) {
            for (std::size_t m = 0; m < t.count; ++m) {
                const double v = std::abs(f->coeffs(c)[m]);
                peak = std::max(peak, v);
                for (std::size_t a = 0; a < d; ++a) {
                    if (std::abs(t.k[m * d + a]) > limit) {
                        outside = std::max(outside, v);
                        break;
                    }
                }
            }
        }
        if (outside > 1e-13 * std::max(peak, 1e-300)) {
            throw ConfigError("state is not band-limited enough for dilation by " + std::to_string(l));
        }
    }

    ResidualOptions ro;
    ro.source = ResidualSource::frozen_perturbation;
    ro.pad = opt.pad;
    ro.include_pressure = opt.include_pressure;
    const auto base = detail::residual_fields(s, cfg, ro);

    SolverConfig scfg = cfg;
    if (opt.adjust_pressure) {
        const double l2 = static_cast<double>(l) * l;
        scfg.a = cfg.a * l2;
        scfg.Fr = cfg.Fr / l;
        scfg.r_fric = cfg.r_fric * l2;
    }
    SimState ds;
    ds.t = s.t / (static_cast<double>(l) * l);
    ds.q1 = dilate(s.q1, l);
    ds.h2 = dilate(s.h2, l);
    ds.u2 = static_cast<double>(l) * dilate(s.u2, l);
    refresh_quasi(ds, scfg);
    const auto scaled = detail::residual_fields(ds, scfg, ro);

    const double l2 = static_cast<double>(l) * l;
    const double l3 = l2 * l;
    const auto dm = scaled.mass - l2 * dilate(base.mass, l);
    const auto dp = scaled.momentum - l3 * dilate(base.momentum, l);
    const double em = detail::relative(lp_norm(dm, 2.0), scaled.mass_scale);
    const double ep = detail::relative(lp_norm(dp, 2.0), scaled.momentum_scale);
    return std::max(em, ep);
}

/// Fields recorded at one time for history diagnostics.
struct SimSnapshot {
    double t = 0.0;
    SpectralField q1;
    SpectralField h2;
    SpectralField u2;
    SpectralField u1;
};

inline SimSnapshot snapshot(const SimState& s) { return {s.t, s.q1, s.h2, s.u2, s.u1_cache}; }

/// Indices (q, q1) of the hybrid norms entering V(T).
struct GronwallIndices {
    double q = 2.0;
    double q1 = 2.0;
    int l0 = 0;
};

/// Incremental trapezoid for
/// V(T) = int_0^T ||q1||^4_{B~^{N/q1-1/2, N/q+1/2}_{q1,q,inf}} + ||q1||_{B~^{N/q1+1, N/q+2}_{q1,q,inf}}
///        + ||grad u1||_{L^inf} + ||grad u1||_{B~^{N/q1-1, N/q}_{q1,q,inf}} + ||grad u||_{L^inf} ds.
class GronwallAccumulator {
public:
    GronwallAccumulator(DyadicFilter filter, GronwallIndices idx) : filter_(std::move(filter)), idx_(idx) {
        const double N = filter_.grid().dim();
        const double a = N / idx_.q1;
        const double b = N / idx_.q;
        s1_ = {a - 0.5, b + 0.5, idx_.q1, idx_.q, inf, inf, idx_.l0};
        s2_ = {a + 1.0, b + 2.0, idx_.q1, idx_.q, inf, inf, idx_.l0};
        s3_ = {a - 1.0, b, idx_.q1, idx_.q, inf, inf, idx_.l0};
        s1_.validate(filter_);
    }

    double integrand(const SimSnapshot& s) const {
        const double n1 = hybrid_besov_norm(filter_, s.q1, s1_);
        const double n2 = hybrid_besov_norm(filter_, s.q1, s2_);
        const auto gu1 = vector_grad(s.u1);
        const auto gu = vector_grad(s.u1 + s.u2);
        return n1 * n1 * n1 * n1 + n2 + lp_norm(gu1, inf) + hybrid_besov_norm(filter_, gu1, s3_) + lp_norm(gu, inf);
    }

    void add(const SimSnapshot& s) {
        const double v = integrand(s);
        if (count_ > 0) {
            if (!(s.t > last_t_)) throw DiagnosticError("snapshot times must be strictly increasing");
            value_ += 0.5 * (s.t - last_t_) * (v + last_v_);
        }
        last_t_ = s.t;
        last_v_ = v;
        ++count_;
    }

    double value() const { return value_; }
    std::size_t count() const { return count_; }

private:
    DyadicFilter filter_;
    GronwallIndices idx_;
    HybridBesovSpec s1_, s2_, s3_;
    double value_ = 0.0;
    double last_t_ = 0.0;
    double last_v_ = 0.0;
    std::size_t count_ = 0;
};

inline double gronwall_exponent(const DyadicFilter& filter, const std::vector<SimSnapshot>& history,
                                const GronwallIndices& idx) {
    if (history.empty()) throw DiagnosticError("V(T) needs a non-empty history");
    GronwallAccumulator acc(filter, idx);
    for (const auto& s : history) acc.add(s);
    return acc.value();
}

/// Incremental F_T norm of (h2, u2):
///   ||h2||_{L~^inf(B~^{N/2-1, N/p}_{2,p,1})} + ||h2||_{L~^1(B~^{N/2+1, N/p}_{2,p,1})}
/// + ||u2||_{L~^inf(B~^{N/2-1, N/p-1}_{2,p,1})} + ||u2||_{L~^1(B~^{N/2+1, N/p+1}_{2,p,1})}.
/// Per-block sups and trapezoid integrals are kept, so the value is
/// non-decreasing in T.
class FtAccumulator {
public:
    FtAccumulator(DyadicFilter filter, double p, int l0) : filter_(std::move(filter)), p_(p), l0_(l0) {
        if (l0 < filter_.l_min() - 1 || l0 > filter_.l_max()) throw ConfigError("l0 outside the filter range");
        if (!(p >= 1.0)) throw ConfigError("F_T index p must be >= 1");
        const std::size_t L = static_cast<std::size_t>(filter_.level_count());
        for (auto* v : {&h_sup_, &h_int_, &u_sup_, &u_int_, &h_last_, &u_last_}) v->assign(L, 0.0);
    }

    void add(double t, const SpectralField& h2, const SpectralField& u2) {
        const auto hb = blocks(h2);
        const auto ub = blocks(u2);
        for (std::size_t i = 0; i < hb.size(); ++i) {
            h_sup_[i] = std::max(h_sup_[i], hb[i]);
            u_sup_[i] = std::max(u_sup_[i], ub[i]);
            if (count_ > 0) {
                h_int_[i] += 0.5 * (t - last_t_) * (hb[i] + h_last_[i]);
                u_int_[i] += 0.5 * (t - last_t_) * (ub[i] + u_last_[i]);
            }
        }
        if (count_ > 0 && !(t > last_t_)) throw DiagnosticError("snapshot times must be strictly increasing");
        h_last_ = hb;
        u_last_ = ub;
        last_t_ = t;
        ++count_;
    }

    void add(const SimSnapshot& s) { add(s.t, s.h2, s.u2); }

    double value() const {
        const double N = filter_.grid().dim();
        const double sp = N / p_;
        return weighted(h_sup_, N / 2 - 1, sp) + weighted(h_int_, N / 2 + 1, sp) + weighted(u_sup_, N / 2 - 1, sp - 1) +
               weighted(u_int_, N / 2 + 1, sp + 1);
    }

    std::size_t count() const { return count_; }

private:
    /// Block norms in L^2 up to l0 and in L^p above.
    std::vector<double> blocks(const SpectralField& f) const {
        const auto b2 = block_norms(filter_, f, 2.0);
        const auto bp = p_ == 2.0 ? b2 : block_norms(filter_, f, p_);
        std::vector<double> out;
        for (int l = filter_.l_min(); l <= filter_.l_max(); ++l) out.push_back(l <= l0_ ? b2.at(l) : bp.at(l));
        return out;
    }

    double weighted(const std::vector<double>& b, double s_low, double s_high) const {
        double acc = 0.0;
        for (int l = filter_.l_min(); l <= filter_.l_max(); ++l) {
            acc += std::pow(2.0, l * (l <= l0_ ? s_low : s_high)) * b[static_cast<std::size_t>(l - filter_.l_min())];
        }
        return acc;
    }

    DyadicFilter filter_;
    double p_;
    int l0_;
    std::vector<double> h_sup_, h_int_, u_sup_, u_int_, h_last_, u_last_;
    double last_t_ = 0.0;
    std::size_t count_ = 0;
};

inline double ft_norm(const DyadicFilter& filter, const std::vector<SimSnapshot>& history, double p, int l0) {
    if (history.empty()) throw DiagnosticError("F_T norm needs a non-empty history");
    FtAccumulator acc(filter, p, l0);
    for (const auto& s : history) acc.add(s);
    return acc.value();
}

}  // namespace qsw
