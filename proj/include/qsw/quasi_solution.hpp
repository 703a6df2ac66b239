#pragma once

// Exact heat evolution of rho^1 = 1 + q^1, its velocity u^1 = -mu grad ln rho^1,
// and the residual checks of the pressureless and friction systems.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <cstddef>
#include <string>
#include <vector>

#include "qsw/besov.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/field.hpp"
#include "qsw/spectral_ops.hpp"
#include "qsw/warnings.hpp"

namespace qsw {

inline constexpr double default_density_floor = 1e-6;

/// Throws DensityFloorError unless 1 + q >= floor at every sample.
inline void check_density_floor(const SpectralField& q, double floor = default_density_floor) {
    const double lo = 1.0 + q.min_value();
    if (!(lo >= floor)) {
        throw DensityFloorError("density " + std::to_string(lo) + " below floor " + std::to_string(floor));
    }
}

struct HeatState {
    double t = 0.0;
    SpectralField q1;
    double mu = 0.0;
    /// Pointwise bounds of rho^1 at t = 0, kept for the maximum principle.
    double rho_min0 = 1.0;
    double rho_max0 = 1.0;
};

/// Multiplies coefficients by exp(-mu |xi|^2 t).
inline SpectralField heat_multiplier(const SpectralField& f, double mu, double t) {
    const auto& xi2 = f.grid().mode_table().xi2;
    return apply_multiplier(f, [&](std::size_t m) { return std::exp(-mu * t * xi2[m]); });
}

/// mu Lap f with the exact symbol -mu |xi|^2; this is d/dt of the heat flow.
inline SpectralField heat_rate(const SpectralField& f, double mu) {
    const auto& xi2 = f.grid().mode_table().xi2;
    return apply_multiplier(f, [&](std::size_t m) { return -mu * xi2[m]; });
}

inline HeatState heat_evolve(const SpectralField& q1_initial, double mu, double t,
                             double floor = default_density_floor) {
    if (!(mu > 0.0)) throw ConfigError("heat evolution needs mu > 0");
    if (!(t >= 0.0)) throw ConfigError("heat evolution needs t >= 0");
    if (q1_initial.components() != 1) throw ShapeError("q1 must be a scalar field");
    check_density_floor(q1_initial, floor);
    HeatState s;
    s.t = t;
    s.mu = mu;
    s.rho_min0 = 1.0 + q1_initial.min_value();
    s.rho_max0 = 1.0 + q1_initial.max_value();
    s.q1 = t == 0.0 ? q1_initial : heat_multiplier(q1_initial, mu, t);
    return s;
}

/// Advances an evolved state by dt using the semigroup property.
inline HeatState heat_advance(const HeatState& s, double dt) {
    if (!(dt >= 0.0)) throw ConfigError("heat evolution needs dt >= 0");
    HeatState out = s;
    out.t = s.t + dt;
    out.q1 = heat_multiplier(s.q1, s.mu, dt);
    return out;
}

struct VelocityOptions {
    /// Truncate ln rho^1 to the dealiased band before differentiating.
    bool band_limit = true;
    double fraction = 2.0 / 3.0;
    /// Discarded share of the L2 mass of ln rho^1 above which a warning fires.
    double tail_tolerance = 1e-10;
    /// Report truncation losses above tail_tolerance.
    bool warn_truncation = true;
    double floor = default_density_floor;
};

/// ln(1 + q) evaluated pointwise, optionally projected on the dealiased band.
inline SpectralField log_density(const SpectralField& q, const VelocityOptions& opt = {}) {
    check_density_floor(q, opt.floor);
    auto w = map_values(q, [](double x) { return std::log1p(x); });
    if (!opt.band_limit) return w;
    auto wb = dealias(w, opt.fraction);
    if (!opt.warn_truncation) return wb;
    const double total = lp_norm(w, 2.0);
    if (total > 0.0) {
        const double tail = lp_norm(w - wb, 2.0) / total;
        if (tail * tail > opt.tail_tolerance) {
            std::ostringstream msg;
            msg << "ln(rho1) truncation discards " << std::scientific << tail * tail << " of its L2 mass";
            warn(msg.str());
        }
    }
    return wb;
}

inline SpectralField velocity_from_density(const SpectralField& q1, double mu, const VelocityOptions& opt = {}) {
    return -mu * grad(log_density(q1, opt));
}

inline SpectralField velocity_from_density(const HeatState& s, const VelocityOptions& opt = {}) {
    return velocity_from_density(s.q1, s.mu, opt);
}

struct MaxPrinciple {
    double min = 0.0;
    double max = 0.0;
    bool pass = false;
};

inline MaxPrinciple max_principle_check(const HeatState& s, double tol = 1e-8) {
    MaxPrinciple r;
    r.min = 1.0 + s.q1.min_value();
    r.max = 1.0 + s.q1.max_value();
    r.pass = r.min >= s.rho_min0 - tol && r.max <= s.rho_max0 + tol;
    return r;
}

/// Decay rate of D^alpha K_mu(t) in L^p: N/2 (1 - 1/p) + |alpha|/2.
struct KernelRateSpec {
    int alpha_order = 0;
    double p = inf;

    double expected(int dim) const {
        const double inv_p = std::isinf(p) ? 0.0 : 1.0 / p;
        return 0.5 * dim * (1.0 - inv_p) + 0.5 * alpha_order;
    }
};

/// All partial derivatives of a given order, stacked as components.
inline SpectralField derivatives_of_order(const SpectralField& f, int order) {
    if (order < 0) throw ConfigError("derivative order must be >= 0");
    SpectralField cur = f;
    for (int k = 0; k < order; ++k) {
        std::vector<SpectralField> parts;
        for (int a = 0; a < f.grid().dim(); ++a) parts.push_back(partial(cur, a));
        cur = SpectralField::stack(parts);
    }
    return cur;
}

/// Ordinary least-squares slope of y against x.
inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw DiagnosticError("least squares fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

struct KernelDecayFit {
    double exponent = 0.0;
    double expected = 0.0;
    double relative_error = 0.0;
    std::vector<double> times;
    std::vector<double> norms;
};

/// Fits ||D^alpha q^1(t)||_{L^p} ~ (1+t)^(-exponent) over log-spaced samples
/// in [t0, t1]. The window must stay before torus saturation:
/// sqrt(4 mu t1) <= period / 8 on every axis.
inline KernelDecayFit kernel_decay_fit(const SpectralField& q1_initial, double mu, const KernelRateSpec& spec,
                                       double t0, double t1, int samples = 24) {
    if (!(t1 > t0) || !(t0 >= 0.0)) throw ConfigError("decay window needs 0 <= t0 < t1");
    if (samples < 5) throw ConfigError("decay fit needs at least 5 samples");
    const Grid& g = q1_initial.grid();
    for (int a = 0; a < g.dim(); ++a) {
        if (std::sqrt(4.0 * mu * t1) > g.period(a) / 8.0) {
            throw DiagnosticError("decay window reaches the torus saturation regime (sqrt(4 mu t1) > period/8)");
        }
    }
    const auto d0 = derivatives_of_order(q1_initial, spec.alpha_order);
    KernelDecayFit out;
    out.expected = spec.expected(g.dim());
    std::vector<double> x;
    std::vector<double> y;
    const double l0 = std::log1p(t0);
    const double l1 = std::log1p(t1);
    for (int i = 0; i < samples; ++i) {
        const double t = std::expm1(l0 + (l1 - l0) * i / (samples - 1));
        const double v = lp_norm(heat_multiplier(d0, mu, t), spec.p);
        if (!(v > 0.0)) throw DiagnosticError("decay fit met a vanishing norm");
        out.times.push_back(t);
        out.norms.push_back(v);
        x.push_back(std::log1p(t));
        y.push_back(std::log(v));
    }
    out.exponent = -least_squares_slope(x, y);
    out.relative_error = std::abs(out.exponent - out.expected) / out.expected;
    return out;
}

struct QuasiResidualOptions {
    /// Residuals are evaluated on a grid refined by this factor.
    int pad = 2;
    double floor = default_density_floor;
};

struct QuasiResidual {
    double mass = 0.0;
    double momentum = 0.0;
};

namespace detail {

/// Terms of the mass and momentum equations for (rho^1, -mu grad ln rho^1),
/// all evaluated pointwise on a padded grid without truncation.
struct QuasiTerms {
    SpectralField rho;
    SpectralField rho_u;
    SpectralField mass_residual;
    double mass_scale = 0.0;
    SpectralField momentum_residual;
    double momentum_scale = 0.0;
};

inline Grid padded_grid(const Grid& g, int pad) {
    if (pad < 1) throw ConfigError("padding factor must be >= 1");
    return Grid(g.dim(), g.n() * pad, g.periods());
}

inline QuasiTerms quasi_terms(const HeatState& s, const QuasiResidualOptions& opt) {
    const Grid gp = padded_grid(s.q1.grid(), opt.pad);
    const SpectralField q = resample(s.q1, gp);
    check_density_floor(q, opt.floor);
    const double mu = s.mu;

    QuasiTerms t;
    t.rho = map_values(q, [](double x) { return 1.0 + x; });
    // u = -mu grad(rho) / rho: the gradient acts on exact coefficients, so
    // round-off from the pointwise quotient meets one derivative fewer than
    // with grad(ln rho).
    const auto inv_rho = map_values(t.rho, [](double x) { return 1.0 / x; });
    const auto u = multiply(inv_rho, grad(q)) * (-mu);
    const auto rho_t = heat_rate(q, mu);

    t.rho_u = multiply(t.rho, u);
    const auto div_flux = div(t.rho_u);
    t.mass_residual = rho_t + div_flux;
    t.mass_scale = lp_norm(rho_t, 2.0) + lp_norm(div_flux, 2.0);

    // d_t u = -mu grad(d_t rho / rho)
    const auto u_t = -mu * grad(multiply(rho_t, inv_rho));
    const auto d_rho_u = multiply(rho_t, u) + multiply(t.rho, u_t);
    const auto convect = div_tensor(multiply(t.rho, outer(u, u)));
    const auto visc = div_tensor(mu * multiply(t.rho, sym_grad(u)));
    t.momentum_residual = d_rho_u + convect - visc;
    t.momentum_scale = lp_norm(d_rho_u, 2.0) + lp_norm(convect, 2.0) + lp_norm(visc, 2.0);
    return t;
}

inline double relative(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

}  // namespace detail

/// Relative L2 residuals of the pressureless system at the quasi-solution,
/// with d_t rho^1 = mu Lap rho^1 substituted analytically. Each residual is
/// divided by the sum of the L2 norms of the terms of its equation.
inline QuasiResidual quasi_residual(const HeatState& s, const QuasiResidualOptions& opt = {}) {
    const auto t = detail::quasi_terms(s, opt);
    return {detail::relative(lp_norm(t.mass_residual, 2.0), t.mass_scale),
            detail::relative(lp_norm(t.momentum_residual, 2.0), t.momentum_scale)};
}

struct FrictionResidual {
    double mass = 0.0;
    double momentum = 0.0;
    /// r mu Fr^2 = 1, the condition under which the quasi-solution is exact.
    bool certified = false;
};

/// Residual of the friction system, where grad(rho)/Fr^2 + r rho u adds
/// (1/Fr^2 - r mu) grad rho to the pressureless residual.
inline FrictionResidual friction_exact_residual(const HeatState& s, double Fr, double r_fric,
                                                const QuasiResidualOptions& opt = {}) {
    if (!(Fr > 0.0)) throw ConfigError("Froude number must be positive");
    if (!(r_fric >= 0.0)) throw ConfigError("friction coefficient must be >= 0");
    const auto t = detail::quasi_terms(s, opt);
    const auto pressure = grad(t.rho) * (1.0 / (Fr * Fr));
    const auto drag = t.rho_u * r_fric;
    const auto res = t.momentum_residual + pressure + drag;
    FrictionResidual out;
    out.mass = detail::relative(lp_norm(t.mass_residual, 2.0), t.mass_scale);
    out.momentum =
        detail::relative(lp_norm(res, 2.0), t.momentum_scale + lp_norm(pressure, 2.0) + lp_norm(drag, 2.0));
    out.certified = std::abs(r_fric * s.mu * Fr * Fr - 1.0) <= 1e-12;
    if (!out.certified) warn("friction exactness needs r mu Fr^2 = 1; residual reported without certification");
    return out;
}

namespace detail {

/// Weights of exp(-z(1-sigma)) against the linear hat functions on [0, 1].
inline void duhamel_weights(double z, double& w_start, double& w_end) {
    if (z < 1e-4) {
        w_start = 0.5 - z / 3.0 + z * z / 8.0;
        w_end = 0.5 - z / 6.0 + z * z / 24.0;
        return;
    }
    const double e = std::exp(-z);
    w_start = (1.0 - e * (1.0 + z)) / (z * z);
    w_end = (1.0 - e) / z - w_start;
}

}  // namespace detail

/// Solution of d_t u - mu Lap u = f at the snapshot times of f, starting from
/// u0 at the first snapshot. The forcing is interpolated linearly between
/// snapshots and the Duhamel integral is then evaluated exactly per mode.
inline std::vector<Snapshot> forced_heat_solve(const SpectralField& u0, const std::vector<Snapshot>& f, double mu) {
    if (f.empty()) throw ConfigError("forced heat solve needs forcing snapshots");
    detail::check_snapshots(f);
    const Grid& g = u0.grid();
    const auto& xi2 = g.mode_table().xi2;
    std::vector<Snapshot> out;
    out.push_back({f.front().t, u0});
    std::vector<ComplexBuffer> cur = u0.all_coeffs();
    for (std::size_t j = 0; j + 1 < f.size(); ++j) {
        f[j].field.check_compatible(u0, "forced_heat_solve");
        const double h = f[j + 1].t - f[j].t;
        for (int c = 0; c < u0.components(); ++c) {
            auto& k = cur[static_cast<std::size_t>(c)];
            const auto& fa = f[j].field.coeffs(c);
            const auto& fb = f[j + 1].field.coeffs(c);
            for (std::size_t m = 0; m < k.size(); ++m) {
                const double z = mu * xi2[m] * h;
                double wa = 0.0, wb = 0.0;
                detail::duhamel_weights(z, wa, wb);
                k[m] = std::exp(-z) * k[m] + h * (wa * fa[m] + wb * fb[m]);
            }
        }
        out.push_back({f[j + 1].t, SpectralField::from_coeffs(g, cur)});
    }
    return out;
}

/// ||u||_{L~^rho1_T(B^{s+2/rho1}_{p,r})} divided by
/// ||u0||_{B^s_{p,r}} + mu^{1/rho2 - 1} ||f||_{L~^rho2_T(B^{s-2+2/rho2}_{p,r})}.
inline EstimateRatio heat_estimate_ratio(const DyadicFilter& filter, const SpectralField& u0,
                                         const std::vector<Snapshot>& f, double mu, const BesovSpec& spec,
                                         double rho1, double rho2) {
    spec.validate();
    if (!(rho2 >= 1.0) || !(rho1 >= rho2)) throw ConfigError("heat estimate needs 1 <= rho2 <= rho1");
    if (!(mu > 0.0)) throw ConfigError("heat estimate needs mu > 0");
    if (f.size() < 2) throw ConfigError("heat estimate needs at least two forcing snapshots");
    const auto u = forced_heat_solve(u0, f, mu);
    const double inv1 = std::isinf(rho1) ? 0.0 : 1.0 / rho1;
    const double inv2 = std::isinf(rho2) ? 0.0 : 1.0 / rho2;
    const double lhs = time_besov_norm(filter, u, rho1, {spec.s + 2.0 * inv1, spec.p, spec.r});
    const double rhs = besov_norm(filter, u0, spec) +
                       std::pow(mu, inv2 - 1.0) *
                           time_besov_norm(filter, f, rho2, {spec.s - 2.0 + 2.0 * inv2, spec.p, spec.r});
    return make_ratio(lhs, rhs);
}

}  // namespace qsw
