#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qsw/besov.hpp"
#include "qsw/dyadic.hpp"
#include "qsw/field.hpp"

namespace qsw {

/// Gaussian bump A exp(-|x - c|^2 / w^2), with |x - c| the periodic
/// (minimum-image) distance.
struct GaussianBump {
    double amplitude = 0.5;
    double width = 1.0;
    /// Centre; negative entries select the box centre on that axis.
    Point center{-1.0, -1.0, -1.0};
};

inline SpectralField gaussian_bump(const Grid& grid, const GaussianBump& b) {
    if (!(b.width > 0.0)) throw ConfigError("bump width must be positive");
    Point c = b.center;
    for (int a = 0; a < grid.dim(); ++a) {
        if (c[static_cast<std::size_t>(a)] < 0.0) c[static_cast<std::size_t>(a)] = 0.5 * grid.period(a);
    }
    return SpectralField::sample(grid, [&](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double L = grid.period(a);
            double d = x[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)];
            d -= L * std::round(d / L);
            r2 += d * d;
        }
        return b.amplitude * std::exp(-r2 / (b.width * b.width));
    });
}

/// Random mean-free field whose coefficients are complex Gaussians with
/// amplitude (1 + |xi|^2)^(-decay/2), restricted to |k_i| <= kmax.
struct RandomFieldSpec {
    int components = 1;
    /// Largest retained integer wavenumber per axis; 0 selects the dealiasing cutoff.
    int kmax = 0;
    double decay = 1.0;
};

inline SpectralField random_band_limited(const Grid& grid, const RandomFieldSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int kc = spec.kmax > 0 ? spec.kmax : grid.dealias_cutoff();
    if (kc > grid.dealias_cutoff()) throw ConfigError("random field band exceeds the dealiasing cutoff");
    const auto& t = grid.mode_table();
    const std::size_t d = static_cast<std::size_t>(grid.dim());
    std::vector<ComplexBuffer> coeffs;
    for (int c = 0; c < spec.components; ++c) {
        ComplexBuffer k(t.count, cplx{});
        for (std::size_t m = 1; m < t.count; ++m) {
            const double re = normal(rng);
            const double im = normal(rng);
            bool keep = true;
            for (std::size_t a = 0; a < d; ++a) {
                if (std::abs(t.k[m * d + a]) > kc) keep = false;
            }
            if (keep) k[m] = std::pow(1.0 + t.xi2[m], -0.5 * spec.decay) * cplx(re, im);
        }
        coeffs.push_back(std::move(k));
    }
    // Round trip through samples so the self-conjugate modes become real.
    auto f = SpectralField::from_coeffs(grid, std::move(coeffs));
    return SpectralField::from_values(grid, f.all_values());
}

/// Random band-limited field rescaled to a prescribed Besov norm.
inline SpectralField random_with_besov_norm(const DyadicFilter& filter, const RandomFieldSpec& spec,
                                            const BesovSpec& norm, double target, std::uint64_t seed) {
    auto f = random_band_limited(filter.grid(), spec, seed);
    const double n = besov_norm(filter, f, norm);
    if (!(n > 0.0)) throw DiagnosticError("random field has zero Besov norm");
    return f * (target / n);
}

}  // namespace qsw
