#pragma once

// Bony decomposition uv = T_u v + T_v u + R(u, v) on the periodic grid.
//
// The zero mode is treated as its own block below every dyadic level: it is
// part of the low-frequency cut-off S_{q-1} used inside T_u v, and the
// mean-mean interaction belongs to R. With this convention the three parts add
// up to the dealiased product exactly. All products are 2/3-dealiased.

#include <cmath>
#include <cstddef>
#include <vector>

#include "qsw/besov.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/field.hpp"

namespace qsw {

struct BonyParts {
    SpectralField Tuv;
    SpectralField Tvu;
    SpectralField Ruv;
};

namespace detail {

inline void check_pair(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v) {
    filter.check_grid(u);
    filter.check_grid(v);
    if (u.components() != 1 || v.components() != 1) throw ShapeError("paraproduct operators act on scalar fields");
}

/// Samples of the blocks Delta_l w for every level, plus the mean.
struct BlockSamples {
    double mean = 0.0;
    std::vector<RealBuffer> blocks;
};

inline BlockSamples block_samples(const DyadicFilter& filter, const SpectralField& w) {
    BlockSamples out;
    out.mean = w.mean();
    for (int l = filter.l_min(); l <= filter.l_max(); ++l) {
        if (filter.entries(l).empty()) {
            out.blocks.emplace_back();
            continue;
        }
        out.blocks.push_back(inverse_fft(w.grid(), filter.block_coeffs(w, l)));
    }
    return out;
}

/// sum_q S'_{q-1} a * Delta_q b, accumulated pointwise (S' includes the mean).
inline RealBuffer para_samples(const BlockSamples& a, const BlockSamples& b, std::size_t points) {
    RealBuffer acc(points, 0.0);
    RealBuffer low(points, a.mean);
    const std::size_t levels = a.blocks.size();
    for (std::size_t q = 0; q < levels; ++q) {
        // low holds mean + sum_{k <= q-2} Delta_k a
        if (q >= 2 && !a.blocks[q - 2].empty()) {
            for (std::size_t i = 0; i < points; ++i) low[i] += a.blocks[q - 2][i];
        }
        if (b.blocks[q].empty()) continue;
        for (std::size_t i = 0; i < points; ++i) acc[i] += low[i] * b.blocks[q][i];
    }
    return acc;
}

inline RealBuffer remainder_samples(const BlockSamples& a, const BlockSamples& b, std::size_t points) {
    RealBuffer acc(points, a.mean * b.mean);
    const std::size_t levels = a.blocks.size();
    for (std::size_t q = 0; q < levels; ++q) {
        if (a.blocks[q].empty()) continue;
        for (std::size_t qq = (q == 0 ? 0 : q - 1); qq <= std::min(levels - 1, q + 1); ++qq) {
            if (b.blocks[qq].empty()) continue;
            for (std::size_t i = 0; i < points; ++i) acc[i] += a.blocks[q][i] * b.blocks[qq][i];
        }
    }
    return acc;
}

}  // namespace detail

/// T_u v = sum_q S_{q-1} u Delta_q v.
inline SpectralField para(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v,
                          double fraction = 2.0 / 3.0) {
    detail::check_pair(filter, u, v);
    const auto a = detail::block_samples(filter, dealias(u, fraction));
    const auto b = detail::block_samples(filter, dealias(v, fraction));
    return dealias(SpectralField::from_values(u.grid(), detail::para_samples(a, b, u.grid().points())), fraction);
}

/// R(u, v) = sum_q Delta_q u (Delta_{q-1} v + Delta_q v + Delta_{q+1} v).
/// Neighbour blocks outside the filter range count as zero.
inline SpectralField remainder(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v,
                               double fraction = 2.0 / 3.0) {
    detail::check_pair(filter, u, v);
    const auto a = detail::block_samples(filter, dealias(u, fraction));
    const auto b = detail::block_samples(filter, dealias(v, fraction));
    return dealias(SpectralField::from_values(u.grid(), detail::remainder_samples(a, b, u.grid().points())), fraction);
}

inline BonyParts bony_decompose(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v,
                                double fraction = 2.0 / 3.0) {
    detail::check_pair(filter, u, v);
    const auto a = detail::block_samples(filter, dealias(u, fraction));
    const auto b = detail::block_samples(filter, dealias(v, fraction));
    const std::size_t np = u.grid().points();
    auto finish = [&](RealBuffer s) { return dealias(SpectralField::from_values(u.grid(), std::move(s)), fraction); };
    return {finish(detail::para_samples(a, b, np)), finish(detail::para_samples(b, a, np)),
            finish(detail::remainder_samples(a, b, np))};
}

enum class ProductLaw {
    /// ||uv||_B <= C (||u||_inf ||v||_B + ||v||_inf ||u||_B)
    linf_besov,
    /// ||uv||_B <= C ||u||_B (||v||_{B_v} + ||v||_inf)
    multiplier,
};

inline EstimateRatio product_law_ratio(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v,
                                       const BesovSpec& spec_out, const BesovSpec& spec_u, const BesovSpec& spec_v,
                                       ProductLaw law = ProductLaw::linf_besov, double fraction = 2.0 / 3.0) {
    detail::check_pair(filter, u, v);
    const double lhs = besov_norm(filter, dealiased_multiply(u, v, fraction), spec_out);
    double rhs = 0.0;
    if (law == ProductLaw::linf_besov) {
        rhs = lp_norm(u, inf) * besov_norm(filter, v, spec_v) + lp_norm(v, inf) * besov_norm(filter, u, spec_u);
    } else {
        rhs = besov_norm(filter, u, spec_u) * (besov_norm(filter, v, spec_v) + lp_norm(v, inf));
    }
    return make_ratio(lhs, rhs);
}

enum class HybridOperator { paraproduct, remainder };

/// ||op(u, v)||_{out} / (||u||_{hu} ||v||_{hv}) with op = T_u v or R(u, v).
inline EstimateRatio hybrid_para_ratio(const DyadicFilter& filter, const SpectralField& u, const SpectralField& v,
                                       const HybridBesovSpec& out, const HybridBesovSpec& hu,
                                       const HybridBesovSpec& hv, HybridOperator op = HybridOperator::paraproduct,
                                       double fraction = 2.0 / 3.0) {
    detail::check_pair(filter, u, v);
    const double nu = hybrid_besov_norm(filter, u, hu);
    const double nv = hybrid_besov_norm(filter, v, hv);
    if (nu == 0.0 || nv == 0.0) {
        EstimateRatio r;
        r.degenerate = true;
        return r;
    }
    const SpectralField w =
        op == HybridOperator::paraproduct ? para(filter, u, v, fraction) : remainder(filter, u, v, fraction);
    return make_ratio(hybrid_besov_norm(filter, w, out), nu * nv);
}

/// ||e^u - 1||_{B^s_{p,1}} / ||u||_{B^s_{p,1}} for ||u||_inf <= 2.
inline EstimateRatio composition_ratio(const DyadicFilter& filter, const SpectralField& u, double s, double p) {
    if (lp_norm(u, inf) > 2.0) throw ConfigError("composition diagnostic needs ||u||_inf <= 2");
    const BesovSpec spec{s, p, 1.0};
    const auto fu = map_values(u, [](double x) { return std::expm1(x); });
    return make_ratio(besov_norm(filter, fu, spec), besov_norm(filter, u, spec));
}

/// ||e^u - 1 - u||_{B^s_{p,1}} / ||u||^2_{B^s_{p,1}}.
inline EstimateRatio composition_quadratic_ratio(const DyadicFilter& filter, const SpectralField& u, double s,
                                                 double p) {
    if (lp_norm(u, inf) > 2.0) throw ConfigError("composition diagnostic needs ||u||_inf <= 2");
    const BesovSpec spec{s, p, 1.0};
    const auto fu = map_values(u, [](double x) { return std::expm1(x) - x; });
    const double nu = besov_norm(filter, u, spec);
    return make_ratio(besov_norm(filter, fu, spec), nu * nu);
}

}  // namespace qsw
