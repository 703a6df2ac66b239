#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qsw/field.hpp"

namespace qsw {

/// Inner and outer radius of the dyadic annulus carrying phi.
inline constexpr double annulus_inner = 3.0 / 4.0;
inline constexpr double annulus_outer = 8.0 / 3.0;

/// Unnormalised radial bump exp(-1/(y(1-y))) mapped onto the annulus.
inline double annulus_bump(double r) {
    if (!(r > annulus_inner) || !(r < annulus_outer)) return 0.0;
    const double y = (r - annulus_inner) / (annulus_outer - annulus_inner);
    return std::exp(-1.0 / (y * (1.0 - y)));
}

/// Littlewood-Paley profile phi(r): the bump divided by its full dyadic sum,
/// so that sum_l phi(2^-l r) = 1 for every r > 0.
inline double lp_profile(double r) {
    const double num = annulus_bump(r);
    if (num == 0.0) return 0.0;
    const int lo = static_cast<int>(std::floor(std::log2(r / annulus_outer)));
    const int hi = static_cast<int>(std::ceil(std::log2(r / annulus_inner)));
    double den = 0.0;
    for (int j = lo; j <= hi; ++j) den += annulus_bump(std::ldexp(r, -j));
    return num / den;
}

/// Sampled dyadic partition phi(2^-l xi) for l in [l_min, l_max].
///
/// The zero mode belongs to no block (homogeneous convention). Weights are
/// stored sparsely per level as (mode index, weight) pairs.
class DyadicFilter {
public:
    struct Entry {
        std::size_t mode;
        double weight;
    };

    DyadicFilter() = default;

    DyadicFilter(const Grid& grid, int l_min, int l_max) : grid_(grid), l_min_(l_min), l_max_(l_max) {
        if (l_min >= l_max) throw ConfigError("dyadic filter needs l_min < l_max");
        if (l_max > top_level(grid)) {
            throw ConfigError("dyadic block " + std::to_string(l_max) + " lies beyond the resolved frequencies (max " +
                              std::to_string(top_level(grid)) + ")");
        }
        const auto& t = grid.mode_table();
        levels_.resize(static_cast<std::size_t>(l_max - l_min + 1));
        covered_.assign(t.count, 1);
        covered_[0] = 0;
        for (std::size_t m = 1; m < t.count; ++m) {
            const double r = std::sqrt(t.xi2[m]);
            const int lo = static_cast<int>(std::floor(std::log2(r / annulus_outer)));
            const int hi = static_cast<int>(std::ceil(std::log2(r / annulus_inner)));
            for (int l = lo; l <= hi; ++l) {
                const double w = lp_profile(std::ldexp(r, -l));
                if (w == 0.0) continue;
                if (l < l_min || l > l_max) {
                    covered_[m] = 0;
                    continue;
                }
                levels_[static_cast<std::size_t>(l - l_min)].push_back({m, w});
            }
        }
    }

    /// Largest level whose annulus still meets the lattice.
    static int top_level(const Grid& grid) {
        return static_cast<int>(std::ceil(std::log2(grid.max_frequency() / annulus_inner))) - 1;
    }
    /// Smallest level whose annulus meets the lattice.
    static int bottom_level(const Grid& grid) {
        return static_cast<int>(std::floor(std::log2(grid.min_frequency() / annulus_outer))) + 1;
    }

    const Grid& grid() const { return grid_; }
    int l_min() const { return l_min_; }
    int l_max() const { return l_max_; }
    int level_count() const { return l_max_ - l_min_ + 1; }

    const std::vector<Entry>& entries(int l) const {
        check_level(l);
        return levels_[static_cast<std::size_t>(l - l_min_)];
    }

    /// Weight phi(2^-l xi) at a mode index (0 when outside the annulus).
    double weight(int l, std::size_t mode) const {
        for (const auto& e : entries(l)) {
            if (e.mode == mode) return e.weight;
        }
        return 0.0;
    }

    /// True when every block touching this mode lies inside the filter range.
    bool covered(std::size_t mode) const { return covered_[mode] != 0; }

    void check_level(int l) const {
        if (l < l_min_ || l > l_max_) {
            throw ConfigError("dyadic level " + std::to_string(l) + " outside filter range [" + std::to_string(l_min_) +
                              ", " + std::to_string(l_max_) + "]");
        }
    }

    void check_grid(const SpectralField& u) const {
        if (u.grid() != grid_) throw ShapeError("dyadic filter: field grid differs from filter grid");
    }

    /// Coefficients of Delta_l u for one component.
    ComplexBuffer block_coeffs(const SpectralField& u, int l, int component = 0) const {
        check_grid(u);
        ComplexBuffer out(grid_.modes(), cplx{});
        const auto& src = u.coeffs(component);
        for (const auto& e : entries(l)) out[e.mode] = e.weight * src[e.mode];
        return out;
    }

    /// Sum of weights over levels lo..hi (inclusive) at every mode.
    std::vector<double> level_sum(int lo, int hi) const {
        std::vector<double> s(grid_.modes(), 0.0);
        for (int l = std::max(lo, l_min_); l <= std::min(hi, l_max_); ++l) {
            for (const auto& e : levels_[static_cast<std::size_t>(l - l_min_)]) s[e.mode] += e.weight;
        }
        return s;
    }

private:
    Grid grid_;
    int l_min_ = 0;
    int l_max_ = 0;
    std::vector<std::vector<Entry>> levels_;
    std::vector<unsigned char> covered_;
};

/// Filter covering every nonzero lattice frequency of the grid.
inline DyadicFilter build_dyadic_filter(const Grid& grid) {
    return DyadicFilter(grid, DyadicFilter::bottom_level(grid), DyadicFilter::top_level(grid));
}

inline DyadicFilter build_dyadic_filter(const Grid& grid, int l_min, int l_max) {
    return DyadicFilter(grid, l_min, l_max);
}

/// Delta_l u = phi(2^-l D) u.
inline SpectralField dyadic_block(const DyadicFilter& filter, const SpectralField& u, int l) {
    filter.check_grid(u);
    filter.check_level(l);
    std::vector<ComplexBuffer> out;
    for (int c = 0; c < u.components(); ++c) out.push_back(filter.block_coeffs(u, l, c));
    return SpectralField::from_coeffs(u.grid(), std::move(out));
}

/// S_l u = sum_{k <= l-1} Delta_k u, defined for l in [l_min, l_max + 1].
/// The mean is not part of any block, so S_l of a constant is zero.
inline SpectralField low_sum(const DyadicFilter& filter, const SpectralField& u, int l) {
    filter.check_grid(u);
    if (l < filter.l_min() || l > filter.l_max() + 1) {
        throw ConfigError("low_sum level " + std::to_string(l) + " outside [l_min, l_max + 1]");
    }
    const auto w = filter.level_sum(filter.l_min(), l - 1);
    return apply_multiplier(u, [&](std::size_t m) { return w[m]; });
}

/// Fraction of the mean-free L2 mass carried by modes the filter range does
/// not fully cover.
inline double unresolved_fraction(const DyadicFilter& filter, const SpectralField& u) {
    filter.check_grid(u);
    const auto& t = u.grid().mode_table();
    double total = 0.0;
    double outside = 0.0;
    for (int c = 0; c < u.components(); ++c) {
        const auto& k = u.coeffs(c);
        for (std::size_t m = 1; m < t.count; ++m) {
            const double e = t.weight[m] * std::norm(k[m]);
            total += e;
            if (!filter.covered(m)) outside += e;
        }
    }
    return total > 0.0 ? outside / total : 0.0;
}

}  // namespace qsw
