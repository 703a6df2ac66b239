#pragma once

// Homogeneous, hybrid and Chemin-Lerner Besov norms over a DyadicFilter.
//
// L^p normalisation: ||u||_p = (vol * mean_j |u(x_j)|^p)^(1/p), i.e. the
// Riemann sum of the continuous integral, which is stable under refinement.
// Vector and tensor fields use the pointwise Euclidean magnitude. p = inf is
// the largest sampled magnitude. Block sums run over the filter range only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qsw/dyadic.hpp"
#include "qsw/warnings.hpp"

namespace qsw {

inline constexpr double inf = std::numeric_limits<double>::infinity();

struct BesovSpec {
    double s = 0.0;
    double p = 2.0;
    double r = 1.0;

    void validate() const {
        if (!(p >= 1.0) || !(r >= 1.0) || !std::isfinite(s)) {
            throw ConfigError("Besov indices need p >= 1, r >= 1 and finite s");
        }
    }
};

struct HybridBesovSpec {
    double s_low = 0.0;
    double s_high = 0.0;
    double p_low = 2.0;
    double p_high = 2.0;
    double r_low = 1.0;
    double r_high = 1.0;
    int l0 = 0;

    BesovSpec low() const { return {s_low, p_low, r_low}; }
    BesovSpec high() const { return {s_high, p_high, r_high}; }

    void validate(const DyadicFilter& filter) const {
        low().validate();
        high().validate();
        if (l0 < filter.l_min() - 1 || l0 > filter.l_max()) {
            throw ConfigError("hybrid crossover l0 = " + std::to_string(l0) + " outside filter range");
        }
    }

    /// Same exponent, Lebesgue and summation indices on both sides.
    static HybridBesovSpec uniform(const BesovSpec& b, int l0) { return {b.s, b.s, b.p, b.p, b.r, b.r, l0}; }
};

struct Snapshot {
    double t = 0.0;
    SpectralField field;
};

/// Time exponent plus an ordered list of snapshots.
struct TimeNormSpec {
    double rho = inf;
    std::vector<Snapshot> snapshots;
};

/// L^p norm of raw samples (pointwise magnitude across components).
inline double lp_norm_samples(const Grid& grid, const std::vector<RealBuffer>& comps, double p) {
    const std::size_t np = grid.points();
    const bool scalar = comps.size() == 1;
    auto magnitude = [&](std::size_t i) {
        if (scalar) return std::abs(comps[0][i]);
        double s = 0.0;
        for (const auto& c : comps) s += c[i] * c[i];
        return std::sqrt(s);
    };
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t i = 0; i < np; ++i) m = std::max(m, magnitude(i));
        return m;
    }
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < np; ++i) {
            const double a = magnitude(i);
            acc += a * a;
        }
        return std::sqrt(grid.volume() * acc / static_cast<double>(np));
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < np; ++i) acc += magnitude(i);
        return grid.volume() * acc / static_cast<double>(np);
    }
    for (std::size_t i = 0; i < np; ++i) acc += std::pow(magnitude(i), p);
    return std::pow(grid.volume() * acc / static_cast<double>(np), 1.0 / p);
}

inline double lp_norm(const SpectralField& u, double p) {
    if (!(p >= 1.0)) throw ConfigError("lp_norm needs p >= 1");
    return lp_norm_samples(u.grid(), u.all_values(), p);
}

/// L2 norm from coefficients (Parseval).
inline double l2_norm_spectral(const Grid& grid, const std::vector<ComplexBuffer>& coeffs) {
    const auto& t = grid.mode_table();
    double acc = 0.0;
    for (const auto& k : coeffs) {
        for (std::size_t m = 0; m < t.count; ++m) acc += t.weight[m] * std::norm(k[m]);
    }
    return std::sqrt(grid.volume() * acc);
}

/// Per-level L^p norms of the dyadic blocks of a field.
struct BlockNorms {
    int l_min = 0;
    double p = 2.0;
    std::vector<double> norms;

    int l_max() const { return l_min + static_cast<int>(norms.size()) - 1; }
    double at(int l) const { return norms[static_cast<std::size_t>(l - l_min)]; }
};

inline BlockNorms block_norms(const DyadicFilter& filter, const SpectralField& u, double p) {
    filter.check_grid(u);
    if (!(p >= 1.0)) throw ConfigError("block norms need p >= 1");
    BlockNorms out{filter.l_min(), p, {}};
    out.norms.reserve(static_cast<std::size_t>(filter.level_count()));
    const Grid& g = u.grid();
    const auto& t = g.mode_table();
    for (int l = filter.l_min(); l <= filter.l_max(); ++l) {
        const auto& entries = filter.entries(l);
        if (entries.empty()) {
            out.norms.push_back(0.0);
            continue;
        }
        if (p == 2.0) {
            double acc = 0.0;
            for (int c = 0; c < u.components(); ++c) {
                const auto& k = u.coeffs(c);
                for (const auto& e : entries) acc += t.weight[e.mode] * e.weight * e.weight * std::norm(k[e.mode]);
            }
            out.norms.push_back(std::sqrt(g.volume() * acc));
            continue;
        }
        std::vector<RealBuffer> comps;
        bool nonzero = false;
        for (int c = 0; c < u.components(); ++c) {
            auto bc = filter.block_coeffs(u, l, c);
            for (const auto& e : entries) {
                if (bc[e.mode] != cplx{}) {
                    nonzero = true;
                    break;
                }
            }
            comps.push_back(inverse_fft(g, bc));
        }
        out.norms.push_back(nonzero ? lp_norm_samples(g, comps, p) : 0.0);
    }
    const double stale = unresolved_fraction(filter, u);
    if (stale > 1e-3) {
        warn("Besov norm truncated: " + std::to_string(100.0 * stale) + "% of L2 mass lies in unresolved blocks");
    }
    return out;
}

/// (sum_{l in [lo, hi]} (2^{ls} b_l)^r)^(1/r); r = inf gives the supremum.
inline double weighted_block_sum(const BlockNorms& b, double s, double r, int lo, int hi) {
    lo = std::max(lo, b.l_min);
    hi = std::min(hi, b.l_max());
    double acc = 0.0;
    for (int l = lo; l <= hi; ++l) {
        const double term = std::pow(2.0, l * s) * b.at(l);
        if (std::isinf(r)) {
            acc = std::max(acc, term);
        } else if (r == 1.0) {
            acc += term;
        } else {
            acc += std::pow(term, r);
        }
    }
    if (std::isinf(r) || r == 1.0) return acc;
    return std::pow(acc, 1.0 / r);
}

inline double besov_norm(const DyadicFilter& filter, const SpectralField& u, const BesovSpec& spec) {
    spec.validate();
    const auto b = block_norms(filter, u, spec.p);
    return weighted_block_sum(b, spec.s, spec.r, filter.l_min(), filter.l_max());
}

/// Low-frequency sum (l <= l0) plus high-frequency sum (l > l0), each with its
/// own exponent and indices.
inline double hybrid_besov_norm(const DyadicFilter& filter, const SpectralField& u, const HybridBesovSpec& h) {
    h.validate(filter);
    double low = 0.0;
    double high = 0.0;
    if (h.l0 >= filter.l_min()) {
        low = weighted_block_sum(block_norms(filter, u, h.p_low), h.s_low, h.r_low, filter.l_min(), h.l0);
    }
    if (h.l0 < filter.l_max()) {
        high = weighted_block_sum(block_norms(filter, u, h.p_high), h.s_high, h.r_high, h.l0 + 1, filter.l_max());
    }
    return low + high;
}

/// u_BF = sum_{l <= l0} Delta_l u and u_HF = sum_{l > l0} Delta_l u.
inline std::pair<SpectralField, SpectralField> freq_split(const DyadicFilter& filter, const SpectralField& u, int l0) {
    filter.check_grid(u);
    if (l0 < filter.l_min() - 1 || l0 > filter.l_max()) throw ConfigError("freq_split: l0 outside filter range");
    const auto wl = filter.level_sum(filter.l_min(), l0);
    const auto wh = filter.level_sum(l0 + 1, filter.l_max());
    return {apply_multiplier(u, [&](std::size_t m) { return wl[m]; }),
            apply_multiplier(u, [&](std::size_t m) { return wh[m]; })};
}

/// sup_l 2^-l ||Delta_l u||_inf over the filter range.
inline double besov_minus1_infty(const DyadicFilter& filter, const SpectralField& u) {
    return besov_norm(filter, u, {-1.0, inf, inf});
}

namespace detail {

inline void check_snapshots(const std::vector<Snapshot>& snaps) {
    if (snaps.size() < 2) throw DiagnosticError("time norms need at least two snapshots");
    for (std::size_t i = 1; i < snaps.size(); ++i) {
        if (!(snaps[i].t > snaps[i - 1].t)) throw DiagnosticError("snapshot times must be strictly increasing");
    }
}

/// Trapezoid L^rho norm in time of a sampled scalar series.
inline double time_lp(const std::vector<double>& t, const std::vector<double>& v, double rho) {
    if (std::isinf(rho)) return *std::max_element(v.begin(), v.end());
    double acc = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i) {
        acc += 0.5 * (t[i] - t[i - 1]) * (std::pow(v[i - 1], rho) + std::pow(v[i], rho));
    }
    return std::pow(acc, 1.0 / rho);
}

}  // namespace detail

/// Per-level time norms ||Delta_l u||_{L^rho_T(L^p)} of a snapshot series.
inline BlockNorms time_block_norms(const DyadicFilter& filter, const std::vector<Snapshot>& snaps, double rho,
                                   double p) {
    detail::check_snapshots(snaps);
    if (!(rho >= 1.0)) throw ConfigError("time exponent rho must be >= 1");
    std::vector<double> times;
    std::vector<BlockNorms> per;
    for (const auto& s : snaps) {
        times.push_back(s.t);
        per.push_back(block_norms(filter, s.field, p));
    }
    BlockNorms out{filter.l_min(), p, {}};
    for (int l = filter.l_min(); l <= filter.l_max(); ++l) {
        std::vector<double> series;
        series.reserve(per.size());
        for (const auto& b : per) series.push_back(b.at(l));
        out.norms.push_back(detail::time_lp(times, series, rho));
    }
    return out;
}

/// Chemin-Lerner norm: time norm inside the dyadic sum.
inline double time_besov_norm(const DyadicFilter& filter, const std::vector<Snapshot>& snaps, double rho,
                              const BesovSpec& spec) {
    spec.validate();
    const auto b = time_block_norms(filter, snaps, rho, spec.p);
    return weighted_block_sum(b, spec.s, spec.r, filter.l_min(), filter.l_max());
}

inline double time_besov_norm(const DyadicFilter& filter, const TimeNormSpec& tn, const BesovSpec& spec) {
    return time_besov_norm(filter, tn.snapshots, tn.rho, spec);
}

/// Plain L^rho_T(B^s_{p,r}) norm: Besov norm per snapshot, then time norm.
inline double plain_time_besov_norm(const DyadicFilter& filter, const std::vector<Snapshot>& snaps, double rho,
                                    const BesovSpec& spec) {
    detail::check_snapshots(snaps);
    std::vector<double> t;
    std::vector<double> v;
    for (const auto& s : snaps) {
        t.push_back(s.t);
        v.push_back(besov_norm(filter, s.field, spec));
    }
    return detail::time_lp(t, v, rho);
}

/// Chemin-Lerner version of the hybrid norm.
inline double time_hybrid_norm(const DyadicFilter& filter, const std::vector<Snapshot>& snaps, double rho,
                               const HybridBesovSpec& h) {
    h.validate(filter);
    double low = 0.0;
    double high = 0.0;
    if (h.l0 >= filter.l_min()) {
        low = weighted_block_sum(time_block_norms(filter, snaps, rho, h.p_low), h.s_low, h.r_low, filter.l_min(), h.l0);
    }
    if (h.l0 < filter.l_max()) {
        high = weighted_block_sum(time_block_norms(filter, snaps, rho, h.p_high), h.s_high, h.r_high, h.l0 + 1,
                                  filter.l_max());
    }
    return low + high;
}

/// A norm ratio produced by an estimate diagnostic; degenerate when the
/// bounding side vanishes.
struct EstimateRatio {
    double value = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool degenerate = false;
};

inline EstimateRatio make_ratio(double lhs, double rhs) {
    EstimateRatio r;
    r.lhs = lhs;
    r.rhs = rhs;
    if (rhs == 0.0) {
        r.degenerate = true;
        r.value = lhs == 0.0 ? 0.0 : inf;
    } else {
        r.value = lhs / rhs;
    }
    return r;
}

/// Result of comparing the heat-semigroup quantity
/// || ||t^s e^{t Lap} u||_p ||_{L^r(dt/t)} with ||u||_{B^{-2s}_{p,r}}.
struct HeatCharacterization {
    double heat_quantity = 0.0;
    double besov = 0.0;
    double ratio = 0.0;
    bool degenerate = false;
};

struct HeatWindow {
    double t_min = 0.0;  // 0 selects 1e-4 / xi_max^2
    double t_max = 0.0;  // 0 selects 1e3 / xi_min^2
    int samples_per_unit_log = 16;
};

inline HeatCharacterization heat_characterization_ratio(const DyadicFilter& filter, const SpectralField& u, double s,
                                                        double p, double r, HeatWindow window = {}) {
    if (!(s > 0.0)) throw ConfigError("heat characterisation needs s > 0");
    BesovSpec spec{-2.0 * s, p, r};
    spec.validate();
    filter.check_grid(u);
    const Grid& g = u.grid();
    const auto& t = g.mode_table();

    // Homogeneous setting: drop the mean, which the semigroup never damps.
    std::vector<ComplexBuffer> base;
    for (int c = 0; c < u.components(); ++c) {
        ComplexBuffer k(u.coeffs(c));
        k[0] = cplx{};
        base.push_back(std::move(k));
    }

    HeatCharacterization out;
    const auto blocks = block_norms(filter, u, p);
    int lo = filter.l_max() + 1;
    int hi = filter.l_min() - 1;
    for (int l = filter.l_min(); l <= filter.l_max(); ++l) {
        if (blocks.at(l) > 0.0) {
            lo = std::min(lo, l);
            hi = std::max(hi, l);
        }
    }
    out.besov = weighted_block_sum(blocks, spec.s, spec.r, filter.l_min(), filter.l_max());
    if (lo > hi || out.besov == 0.0) {
        out.degenerate = true;
        return out;
    }

    const double t_min = window.t_min > 0.0 ? window.t_min : 1e-4 / (g.max_frequency() * g.max_frequency());
    const double t_max = window.t_max > 0.0 ? window.t_max : 1e3 / (g.min_frequency() * g.min_frequency());
    const double top = std::ldexp(annulus_outer, hi);
    const double bottom = std::ldexp(annulus_inner, lo);
    if (t_min * top * top > 1e-2 || t_max * bottom * bottom < 20.0) {
        throw DiagnosticError("heat characterisation window does not cover the active dyadic blocks");
    }

    auto heat_norm = [&](double time) {
        std::vector<RealBuffer> comps;
        std::vector<ComplexBuffer> ks;
        for (const auto& b : base) {
            ComplexBuffer k(b);
            for (std::size_t m = 0; m < t.count; ++m) k[m] *= std::exp(-time * t.xi2[m]);
            ks.push_back(std::move(k));
        }
        if (p == 2.0) return l2_norm_spectral(g, ks);
        for (const auto& k : ks) comps.push_back(inverse_fft(g, k));
        return lp_norm_samples(g, comps, p);
    };

    const double a = std::log(t_min);
    const double b = std::log(t_max);
    const int steps = std::max(8, static_cast<int>(std::ceil((b - a) * window.samples_per_unit_log)));
    const double h = (b - a) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double tau = a + i * h;
        const double time = std::exp(tau);
        const double val = std::pow(time, s) * heat_norm(time);
        if (std::isinf(r)) {
            acc = std::max(acc, val);
        } else {
            acc += ((i == 0 || i == steps) ? 0.5 : 1.0) * h * std::pow(val, r);
        }
    }
    if (!std::isinf(r)) {
        // Below t_min the semigroup is the identity to first order.
        const double u0 = heat_norm(0.0);
        acc += std::pow(u0, r) * std::pow(t_min, s * r) / (s * r);
        out.heat_quantity = std::pow(acc, 1.0 / r);
    } else {
        out.heat_quantity = acc;
    }
    out.ratio = out.heat_quantity / out.besov;
    return out;
}

}  // namespace qsw
