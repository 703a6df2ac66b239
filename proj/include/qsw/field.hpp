#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qsw/error.hpp"
#include "qsw/fft.hpp"
#include "qsw/grid.hpp"

namespace qsw {

using Point = std::array<double, 3>;

/// Scalar, vector or tensor field on a periodic grid holding both its samples
/// and its normalised Fourier coefficients (half-spectrum layout).
///
/// Vectors have dim components; tensors have dim*dim components stored
/// row-major, component (i, j) at i*dim + j. Both representations are kept
/// consistent by every operation; fields are immutable value types apart from
/// the explicit in-place arithmetic operators.
class SpectralField {
public:
    SpectralField() = default;

    static SpectralField zeros(const Grid& grid, int components = 1) {
        SpectralField f;
        f.grid_ = grid;
        f.values_.assign(static_cast<std::size_t>(components), RealBuffer(grid.points(), 0.0));
        f.coeffs_.assign(static_cast<std::size_t>(components), ComplexBuffer(grid.modes(), cplx{}));
        return f;
    }

    static SpectralField from_values(const Grid& grid, std::vector<RealBuffer> values) {
        SpectralField f;
        f.grid_ = grid;
        f.coeffs_.reserve(values.size());
        for (const auto& v : values) {
            if (v.size() != grid.points()) throw ShapeError("from_values: sample count does not match grid");
            f.coeffs_.push_back(forward_fft(grid, v));
        }
        f.values_ = std::move(values);
        return f;
    }

    static SpectralField from_values(const Grid& grid, RealBuffer values) {
        std::vector<RealBuffer> v;
        v.push_back(std::move(values));
        return from_values(grid, std::move(v));
    }

    static SpectralField from_coeffs(const Grid& grid, std::vector<ComplexBuffer> coeffs) {
        SpectralField f;
        f.grid_ = grid;
        f.values_.reserve(coeffs.size());
        for (const auto& c : coeffs) {
            if (c.size() != grid.modes()) throw ShapeError("from_coeffs: coefficient count does not match grid");
            f.values_.push_back(inverse_fft(grid, c));
        }
        f.coeffs_ = std::move(coeffs);
        return f;
    }

    static SpectralField from_coeffs(const Grid& grid, ComplexBuffer coeffs) {
        std::vector<ComplexBuffer> c;
        c.push_back(std::move(coeffs));
        return from_coeffs(grid, std::move(c));
    }

    /// Samples a scalar function of position at the grid points.
    static SpectralField sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
        RealBuffer v(grid.points());
        for_each_point(grid, [&](std::size_t idx, const Point& x) { v[idx] = fn(x); });
        return from_values(grid, std::move(v));
    }

    /// Samples a vector-valued function (dim components) at the grid points.
    static SpectralField sample_vector(const Grid& grid, const std::function<Point(const Point&)>& fn) {
        std::vector<RealBuffer> v(static_cast<std::size_t>(grid.dim()), RealBuffer(grid.points()));
        for_each_point(grid, [&](std::size_t idx, const Point& x) {
            const Point r = fn(x);
            for (int c = 0; c < grid.dim(); ++c) v[static_cast<std::size_t>(c)][idx] = r[static_cast<std::size_t>(c)];
        });
        return from_values(grid, std::move(v));
    }

    /// Visits every grid point in storage order with its physical coordinates.
    template <class F>
    static void for_each_point(const Grid& grid, F&& fn) {
        const int n = grid.n();
        const int d = grid.dim();
        std::array<int, 3> idx{0, 0, 0};
        const std::size_t total = grid.points();
        for (std::size_t p = 0; p < total; ++p) {
            Point x{0.0, 0.0, 0.0};
            for (int a = 0; a < d; ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(a, idx[static_cast<std::size_t>(a)]);
            fn(p, x);
            for (int a = d - 1; a >= 0; --a) {
                if (++idx[static_cast<std::size_t>(a)] < n) break;
                idx[static_cast<std::size_t>(a)] = 0;
            }
        }
    }

    const Grid& grid() const { return grid_; }
    int components() const { return static_cast<int>(values_.size()); }
    bool empty() const { return values_.empty(); }

    const RealBuffer& values(int c = 0) const { return values_.at(static_cast<std::size_t>(c)); }
    const ComplexBuffer& coeffs(int c = 0) const { return coeffs_.at(static_cast<std::size_t>(c)); }
    const std::vector<RealBuffer>& all_values() const { return values_; }
    const std::vector<ComplexBuffer>& all_coeffs() const { return coeffs_; }

    SpectralField component(int c) const {
        SpectralField f;
        f.grid_ = grid_;
        f.values_.push_back(values(c));
        f.coeffs_.push_back(coeffs(c));
        return f;
    }

    /// Builds a multi-component field from scalar parts on the same grid.
    static SpectralField stack(const std::vector<SpectralField>& parts) {
        if (parts.empty()) throw ShapeError("stack: no components");
        SpectralField f;
        f.grid_ = parts.front().grid();
        for (const auto& p : parts) {
            if (p.grid() != f.grid_) throw ShapeError("stack: grid mismatch");
            for (int c = 0; c < p.components(); ++c) {
                f.values_.push_back(p.values(c));
                f.coeffs_.push_back(p.coeffs(c));
            }
        }
        return f;
    }

    /// Coefficient at an integer wavevector, using Hermitian symmetry for
    /// modes outside the stored half spectrum.
    cplx coefficient(int c, const std::array<int, 3>& k) const {
        const int n = grid_.n();
        const int d = grid_.dim();
        const int last = d - 1;
        std::array<int, 3> kk = k;
        bool conj = false;
        if (kk[static_cast<std::size_t>(last)] < 0) {
            for (int a = 0; a < d; ++a) kk[static_cast<std::size_t>(a)] = -kk[static_cast<std::size_t>(a)];
            conj = true;
        }
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            int ka = kk[static_cast<std::size_t>(a)];
            if (a == last) {
                if (ka > n / 2) return {};
                idx = idx * static_cast<std::size_t>(grid_.half_n()) + static_cast<std::size_t>(ka);
            } else {
                if (ka < -n / 2 || ka >= n / 2) return {};
                if (ka < 0) ka += n;
                idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(ka);
            }
        }
        const cplx v = coeffs(c)[idx];
        return conj ? std::conj(v) : v;
    }

    /// Spatial mean of a component (the k = 0 coefficient).
    double mean(int c = 0) const { return coeffs(c)[0].real(); }

    SpectralField& operator+=(const SpectralField& o) { return axpy(1.0, o); }
    SpectralField& operator-=(const SpectralField& o) { return axpy(-1.0, o); }
    SpectralField& operator*=(double s) {
        for (auto& v : values_) for (auto& x : v) x *= s;
        for (auto& c : coeffs_) for (auto& x : c) x *= s;
        return *this;
    }

    /// this += s * o
    SpectralField& axpy(double s, const SpectralField& o) {
        check_compatible(o, "axpy");
        for (std::size_t c = 0; c < values_.size(); ++c) {
            auto& v = values_[c];
            const auto& ov = o.values_[c];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] += s * ov[i];
            auto& k = coeffs_[c];
            const auto& ok = o.coeffs_[c];
            for (std::size_t i = 0; i < k.size(); ++i) k[i] += s * ok[i];
        }
        return *this;
    }

    /// Adds a constant to every component (the mean coefficient and every sample).
    SpectralField& operator+=(double s) {
        for (auto& v : values_) for (auto& x : v) x += s;
        for (auto& c : coeffs_) c[0] += s;
        return *this;
    }

    friend SpectralField operator+(SpectralField a, double s) { return a += s; }
    friend SpectralField operator-(SpectralField a, double s) { return a += -s; }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
    friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
    friend SpectralField operator-(SpectralField a) { return a *= -1.0; }

    void check_compatible(const SpectralField& o, const char* what) const {
        if (o.grid_ != grid_) throw ShapeError(std::string(what) + ": grid mismatch");
        if (o.components() != components()) throw ShapeError(std::string(what) + ": component count mismatch");
    }

    /// Largest absolute sample over all components.
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : values_) for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double min_value(int c = 0) const { return *std::min_element(values(c).begin(), values(c).end()); }
    double max_value(int c = 0) const { return *std::max_element(values(c).begin(), values(c).end()); }

    bool all_finite() const {
        for (const auto& v : values_) for (double x : v) if (!std::isfinite(x)) return false;
        return true;
    }

private:
    Grid grid_;
    std::vector<RealBuffer> values_;
    std::vector<ComplexBuffer> coeffs_;
};

/// Forward transform of a field given only by its samples; the returned
/// coefficients are those the field already carries.
inline std::vector<ComplexBuffer> transform(const SpectralField& f) { return f.all_coeffs(); }

/// Rebuilds samples from the coefficients of a field.
inline std::vector<RealBuffer> inverse_transform(const SpectralField& f) {
    std::vector<RealBuffer> out;
    for (int c = 0; c < f.components(); ++c) out.push_back(inverse_fft(f.grid(), f.coeffs(c)));
    return out;
}

/// Applies a real Fourier multiplier m(mode index) to every component.
template <class Mult>
SpectralField apply_multiplier(const SpectralField& f, Mult&& m) {
    std::vector<ComplexBuffer> out;
    out.reserve(static_cast<std::size_t>(f.components()));
    const std::size_t nm = f.grid().modes();
    for (int c = 0; c < f.components(); ++c) {
        ComplexBuffer k(f.coeffs(c));
        for (std::size_t i = 0; i < nm; ++i) k[i] *= m(i);
        out.push_back(std::move(k));
    }
    return SpectralField::from_coeffs(f.grid(), std::move(out));
}

/// Applies f elementwise to every sample.
template <class Fn>
SpectralField map_values(const SpectralField& f, Fn&& fn) {
    std::vector<RealBuffer> out;
    for (int c = 0; c < f.components(); ++c) {
        RealBuffer v(f.values(c));
        for (auto& x : v) x = fn(x);
        out.push_back(std::move(v));
    }
    return SpectralField::from_values(f.grid(), std::move(out));
}

/// Mask of modes retained by the dealiasing rule: |k_i| <= cutoff on every axis.
inline std::vector<unsigned char> dealias_mask(const Grid& grid, double fraction = 2.0 / 3.0) {
    const int kc = grid.dealias_cutoff(fraction);
    const auto& t = grid.mode_table();
    const std::size_t d = static_cast<std::size_t>(grid.dim());
    std::vector<unsigned char> mask(t.count, 1);
    for (std::size_t m = 0; m < t.count; ++m) {
        for (std::size_t a = 0; a < d; ++a) {
            if (std::abs(t.k[m * d + a]) > kc) {
                mask[m] = 0;
                break;
            }
        }
    }
    return mask;
}

/// Zeroes every coefficient outside the dealiased band.
inline SpectralField dealias(const SpectralField& f, double fraction = 2.0 / 3.0) {
    const auto mask = dealias_mask(f.grid(), fraction);
    return apply_multiplier(f, [&](std::size_t i) { return mask[i] ? 1.0 : 0.0; });
}

/// True when no coefficient outside the dealiased band exceeds tol (relative
/// to the largest coefficient).
inline bool is_band_limited(const SpectralField& f, double fraction = 2.0 / 3.0, double tol = 1e-14) {
    const auto mask = dealias_mask(f.grid(), fraction);
    double peak = 0.0;
    double outside = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        const auto& k = f.coeffs(c);
        for (std::size_t i = 0; i < k.size(); ++i) {
            const double a = std::abs(k[i]);
            peak = std::max(peak, a);
            if (!mask[i]) outside = std::max(outside, a);
        }
    }
    return outside <= tol * std::max(peak, 1e-300);
}

/// Pointwise product. Each operand is either scalar or has the same number of
/// components as the other; a scalar operand multiplies every component.
inline SpectralField multiply(const SpectralField& a, const SpectralField& b) {
    if (a.grid() != b.grid()) throw ShapeError("multiply: grid mismatch");
    const bool a_scalar = a.components() == 1;
    const bool b_scalar = b.components() == 1;
    if (!a_scalar && !b_scalar && a.components() != b.components()) {
        throw ShapeError("multiply: component count mismatch");
    }
    const int nc = std::max(a.components(), b.components());
    std::vector<RealBuffer> out;
    out.reserve(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        const auto& av = a.values(a_scalar ? 0 : c);
        const auto& bv = b.values(b_scalar ? 0 : c);
        RealBuffer v(av.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = av[i] * bv[i];
        out.push_back(std::move(v));
    }
    return SpectralField::from_values(a.grid(), std::move(out));
}

/// The reference product of the solver: both operands truncated to the
/// dealiased band, multiplied pointwise, and the result truncated again. For
/// band-limited operands this is the exact product projected on the band.
inline SpectralField dealiased_multiply(const SpectralField& a, const SpectralField& b, double fraction = 2.0 / 3.0) {
    return dealias(multiply(dealias(a, fraction), dealias(b, fraction)), fraction);
}

/// Spectral interpolation onto another grid with the same box: coefficients
/// are copied where both lattices resolve them and zeroed elsewhere. Nyquist
/// modes of either grid are dropped to keep the result real.
inline SpectralField resample(const SpectralField& f, const Grid& target) {
    const Grid& g = f.grid();
    if (g.dim() != target.dim()) throw ShapeError("resample: dimension mismatch");
    for (int a = 0; a < g.dim(); ++a) {
        if (g.period(a) != target.period(a)) throw ShapeError("resample: period mismatch");
    }
    const int limit = std::min(g.n(), target.n()) / 2;
    const auto& t = target.mode_table();
    const std::size_t d = static_cast<std::size_t>(g.dim());
    std::vector<ComplexBuffer> out;
    for (int c = 0; c < f.components(); ++c) {
        ComplexBuffer k(t.count, cplx{});
        for (std::size_t m = 0; m < t.count; ++m) {
            std::array<int, 3> kv{0, 0, 0};
            bool keep = true;
            for (std::size_t a = 0; a < d; ++a) {
                kv[a] = t.k[m * d + a];
                if (std::abs(kv[a]) >= limit) keep = false;
            }
            if (keep) k[m] = f.coefficient(c, kv);
        }
        out.push_back(std::move(k));
    }
    return SpectralField::from_coeffs(target, std::move(out));
}

/// Euclidean norm of the components, pointwise, as a scalar field.
inline SpectralField pointwise_magnitude(const SpectralField& f) {
    RealBuffer v(f.grid().points(), 0.0);
    for (int c = 0; c < f.components(); ++c) {
        const auto& fv = f.values(c);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += fv[i] * fv[i];
    }
    for (auto& x : v) x = std::sqrt(x);
    return SpectralField::from_values(f.grid(), std::move(v));
}

/// Discrete L2 norm of the coefficient difference relative to the reference.
inline double relative_l2_difference(const SpectralField& a, const SpectralField& ref) {
    a.check_compatible(ref, "relative_l2_difference");
    double num = 0.0;
    double den = 0.0;
    for (int c = 0; c < a.components(); ++c) {
        const auto& av = a.values(c);
        const auto& rv = ref.values(c);
        for (std::size_t i = 0; i < av.size(); ++i) {
            num += (av[i] - rv[i]) * (av[i] - rv[i]);
            den += rv[i] * rv[i];
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::sqrt(num);
    return std::sqrt(num / den);
}

}  // namespace qsw
