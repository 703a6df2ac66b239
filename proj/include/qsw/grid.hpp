#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsw/error.hpp"

namespace qsw {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Per-mode lookup tables for the half-spectrum (r2c) layout of a grid.
///
/// Axes 0..dim-2 carry all n signed wavenumbers, the last axis carries
/// k = 0..n/2. Mode index is row-major over that shape.
struct ModeTable {
    std::size_t count = 0;
    /// Signed integer wavenumbers, dim entries per mode.
    std::vector<int> k;
    /// Physical frequency 2*pi*k/a per axis, dim entries per mode.
    std::vector<double> xi;
    /// Derivative frequency: xi with Nyquist modes zeroed per axis.
    std::vector<double> xi_d;
    /// |xi|^2 (Nyquist included).
    std::vector<double> xi2;
    /// Hermitian multiplicity of the mode in full-spectrum sums (1 or 2).
    std::vector<double> weight;
};

/// Periodic box T_a^N discretised with n points per axis.
class Grid {
public:
    Grid() = default;

    Grid(int dim, int n, std::array<double, 3> period) : dim_(dim), n_(n), period_(period) {
        if (dim < 1 || dim > 3) {
            throw ConfigError("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
        }
        if (n < 8 || (n & (n - 1)) != 0) {
            throw ConfigError("points per axis must be a power of two >= 8, got " + std::to_string(n));
        }
        for (int i = 0; i < dim; ++i) {
            if (!(period[static_cast<std::size_t>(i)] > 0.0) || !std::isfinite(period[static_cast<std::size_t>(i)])) {
                throw ConfigError("grid period must be positive");
            }
        }
        for (int i = dim; i < 3; ++i) period_[static_cast<std::size_t>(i)] = 1.0;
        modes_ = build_modes();
    }

    int dim() const { return dim_; }
    int n() const { return n_; }
    double period(int axis) const { return period_[static_cast<std::size_t>(axis)]; }
    const std::array<double, 3>& periods() const { return period_; }

    std::size_t points() const {
        std::size_t p = 1;
        for (int i = 0; i < dim_; ++i) p *= static_cast<std::size_t>(n_);
        return p;
    }
    std::size_t modes() const { return modes_ ? modes_->count : 0; }
    /// Length of the last (halved) spectral axis.
    int half_n() const { return n_ / 2 + 1; }

    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim_; ++i) v *= period(i);
        return v;
    }
    double spacing(int axis) const { return period(axis) / n_; }

    /// Fundamental frequency 2*pi/a along an axis.
    double dxi(int axis) const { return two_pi / period(axis); }

    /// Smallest and largest nonzero |xi| on the lattice.
    double min_frequency() const {
        double m = dxi(0);
        for (int i = 1; i < dim_; ++i) m = std::min(m, dxi(i));
        return m;
    }
    double max_frequency() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double x = 0.5 * n_ * dxi(i);
            s += x * x;
        }
        return std::sqrt(s);
    }

    /// Largest retained |k_i| under the dealiasing fraction (2/3 rule by default).
    int dealias_cutoff(double fraction = 2.0 / 3.0) const {
        const int kc = static_cast<int>(std::ceil(fraction * n_ / 2.0)) - 1;
        return std::max(kc, 0);
    }

    const ModeTable& mode_table() const { return *modes_; }

    /// Physical coordinate of grid point j along an axis.
    double coordinate(int axis, int j) const { return j * spacing(axis); }

    bool operator==(const Grid& o) const {
        if (dim_ != o.dim_ || n_ != o.n_) return false;
        for (int i = 0; i < dim_; ++i) {
            if (period(i) != o.period(i)) return false;
        }
        return true;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

    /// Signed integer wavenumbers along a full axis, FFT order.
    std::vector<int> axis_wavenumbers() const {
        std::vector<int> ks(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) ks[static_cast<std::size_t>(j)] = j < n_ / 2 ? j : j - n_;
        return ks;
    }

private:
    std::shared_ptr<const ModeTable> build_modes() const {
        auto t = std::make_shared<ModeTable>();
        const std::size_t d = static_cast<std::size_t>(dim_);
        std::size_t count = static_cast<std::size_t>(half_n());
        for (int i = 0; i + 1 < dim_; ++i) count *= static_cast<std::size_t>(n_);
        t->count = count;
        t->k.resize(count * d);
        t->xi.resize(count * d);
        t->xi_d.resize(count * d);
        t->xi2.resize(count);
        t->weight.resize(count);

        std::array<int, 3> idx{0, 0, 0};
        const int last = dim_ - 1;
        for (std::size_t m = 0; m < count; ++m) {
            double s2 = 0.0;
            for (int a = 0; a < dim_; ++a) {
                const int j = idx[static_cast<std::size_t>(a)];
                int k;
                if (a == last) {
                    k = j;
                } else {
                    k = j < n_ / 2 ? j : j - n_;
                }
                const bool nyquist = (a == last) ? (k == n_ / 2) : (k == -n_ / 2);
                const double x = k * dxi(a);
                t->k[m * d + static_cast<std::size_t>(a)] = k;
                t->xi[m * d + static_cast<std::size_t>(a)] = x;
                t->xi_d[m * d + static_cast<std::size_t>(a)] = nyquist ? 0.0 : x;
                s2 += x * x;
            }
            t->xi2[m] = s2;
            const int kl = idx[static_cast<std::size_t>(last)];
            t->weight[m] = (kl == 0 || kl == n_ / 2) ? 1.0 : 2.0;

            for (int a = last; a >= 0; --a) {
                auto& ia = idx[static_cast<std::size_t>(a)];
                const int len = (a == last) ? half_n() : n_;
                if (++ia < len) break;
                ia = 0;
            }
        }
        return t;
    }

    int dim_ = 0;
    int n_ = 0;
    std::array<double, 3> period_{1.0, 1.0, 1.0};
    std::shared_ptr<const ModeTable> modes_;
};

/// Builds a cubic grid with the same period along every axis.
inline Grid make_grid(int dim, int n, double period) {
    return Grid(dim, n, {period, period, period});
}

}  // namespace qsw
