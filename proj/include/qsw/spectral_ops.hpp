#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qsw/field.hpp"

namespace qsw {

namespace detail {

inline ComplexBuffer derivative_coeffs(const Grid& grid, const ComplexBuffer& c, int axis) {
    const auto& t = grid.mode_table();
    const std::size_t d = static_cast<std::size_t>(grid.dim());
    ComplexBuffer out(c.size());
    for (std::size_t m = 0; m < c.size(); ++m) {
        out[m] = cplx(0.0, t.xi_d[m * d + static_cast<std::size_t>(axis)]) * c[m];
    }
    return out;
}

inline void require_components(const SpectralField& f, int expected, const char* what) {
    if (f.components() != expected) {
        throw ShapeError(std::string(what) + ": expected " + std::to_string(expected) + " components, got " +
                         std::to_string(f.components()));
    }
}

}  // namespace detail

/// Spectral partial derivative of every component along an axis.
/// Nyquist modes have no resolved odd derivative and map to zero.
inline SpectralField partial(const SpectralField& f, int axis) {
    std::vector<ComplexBuffer> out;
    for (int c = 0; c < f.components(); ++c) out.push_back(detail::derivative_coeffs(f.grid(), f.coeffs(c), axis));
    return SpectralField::from_coeffs(f.grid(), std::move(out));
}

inline SpectralField grad(const SpectralField& f) {
    detail::require_components(f, 1, "grad");
    std::vector<ComplexBuffer> out;
    for (int a = 0; a < f.grid().dim(); ++a) out.push_back(detail::derivative_coeffs(f.grid(), f.coeffs(0), a));
    return SpectralField::from_coeffs(f.grid(), std::move(out));
}

inline SpectralField div(const SpectralField& v) {
    const int d = v.grid().dim();
    detail::require_components(v, d, "div");
    ComplexBuffer acc(v.grid().modes(), cplx{});
    for (int a = 0; a < d; ++a) {
        const auto da = detail::derivative_coeffs(v.grid(), v.coeffs(a), a);
        for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += da[m];
    }
    return SpectralField::from_coeffs(v.grid(), std::move(acc));
}

/// Laplacian applied componentwise, built from the same derivative symbols as
/// grad and div so that laplacian == div(grad(.)) exactly.
inline SpectralField laplacian(const SpectralField& f) {
    const auto& t = f.grid().mode_table();
    const std::size_t d = static_cast<std::size_t>(f.grid().dim());
    return apply_multiplier(f, [&](std::size_t m) {
        double s = 0.0;
        for (std::size_t a = 0; a < d; ++a) s += t.xi_d[m * d + a] * t.xi_d[m * d + a];
        return -s;
    });
}

/// Full gradient tensor of a vector field, (grad u)_{ij} = d_j u_i.
inline SpectralField vector_grad(const SpectralField& v) {
    const int d = v.grid().dim();
    detail::require_components(v, d, "vector_grad");
    std::vector<ComplexBuffer> out;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) out.push_back(detail::derivative_coeffs(v.grid(), v.coeffs(i), j));
    }
    return SpectralField::from_coeffs(v.grid(), std::move(out));
}

/// Symmetric gradient D(u) = (grad u + grad u^T) / 2.
inline SpectralField sym_grad(const SpectralField& v) {
    const int d = v.grid().dim();
    detail::require_components(v, d, "sym_grad");
    std::vector<ComplexBuffer> partials;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) partials.push_back(detail::derivative_coeffs(v.grid(), v.coeffs(i), j));
    }
    std::vector<ComplexBuffer> out;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const auto& a = partials[static_cast<std::size_t>(i * d + j)];
            const auto& b = partials[static_cast<std::size_t>(j * d + i)];
            ComplexBuffer s(a.size());
            for (std::size_t m = 0; m < s.size(); ++m) s[m] = 0.5 * (a[m] + b[m]);
            out.push_back(std::move(s));
        }
    }
    return SpectralField::from_coeffs(v.grid(), std::move(out));
}

/// Row divergence of a tensor field, (div T)_i = sum_j d_j T_{ij}.
inline SpectralField div_tensor(const SpectralField& t) {
    const int d = t.grid().dim();
    detail::require_components(t, d * d, "div_tensor");
    std::vector<ComplexBuffer> out;
    for (int i = 0; i < d; ++i) {
        ComplexBuffer acc(t.grid().modes(), cplx{});
        for (int j = 0; j < d; ++j) {
            const auto dj = detail::derivative_coeffs(t.grid(), t.coeffs(i * d + j), j);
            for (std::size_t m = 0; m < acc.size(); ++m) acc[m] += dj[m];
        }
        out.push_back(std::move(acc));
    }
    return SpectralField::from_coeffs(t.grid(), std::move(out));
}

/// Vorticity components: none in 1D, the scalar d_0 u_1 - d_1 u_0 in 2D and
/// the usual three components in 3D.
inline SpectralField curl(const SpectralField& v) {
    const int d = v.grid().dim();
    detail::require_components(v, d, "curl");
    const auto& g = v.grid();
    auto dd = [&](int comp, int axis) { return detail::derivative_coeffs(g, v.coeffs(comp), axis); };
    auto sub = [](const ComplexBuffer& a, const ComplexBuffer& b) {
        ComplexBuffer r(a.size());
        for (std::size_t m = 0; m < r.size(); ++m) r[m] = a[m] - b[m];
        return r;
    };
    std::vector<ComplexBuffer> out;
    if (d == 1) {
        out.emplace_back(g.modes(), cplx{});
    } else if (d == 2) {
        out.push_back(sub(dd(1, 0), dd(0, 1)));
    } else {
        out.push_back(sub(dd(2, 1), dd(1, 2)));
        out.push_back(sub(dd(0, 2), dd(2, 0)));
        out.push_back(sub(dd(1, 0), dd(0, 1)));
    }
    return SpectralField::from_coeffs(g, std::move(out));
}

/// Divergence-free (solenoidal) part of a vector field by Fourier projection
/// P = I - xi xi^T / |xi|^2; the mean mode is kept in the solenoidal part.
inline SpectralField solenoidal_part(const SpectralField& v) {
    const int d = v.grid().dim();
    detail::require_components(v, d, "solenoidal_part");
    const auto& t = v.grid().mode_table();
    const std::size_t dd = static_cast<std::size_t>(d);
    std::vector<ComplexBuffer> out(dd, ComplexBuffer(v.grid().modes()));
    for (std::size_t m = 0; m < t.count; ++m) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < dd; ++a) k2 += t.xi_d[m * dd + a] * t.xi_d[m * dd + a];
        cplx dot{};
        for (std::size_t a = 0; a < dd; ++a) dot += t.xi_d[m * dd + a] * v.coeffs(static_cast<int>(a))[m];
        for (std::size_t a = 0; a < dd; ++a) {
            const cplx c = v.coeffs(static_cast<int>(a))[m];
            out[a][m] = k2 > 0.0 ? c - t.xi_d[m * dd + a] * dot / k2 : c;
        }
    }
    return SpectralField::from_coeffs(v.grid(), std::move(out));
}

/// Pointwise (a . b) for two vector fields.
inline SpectralField dot(const SpectralField& a, const SpectralField& b) {
    const int d = a.grid().dim();
    detail::require_components(a, d, "dot");
    detail::require_components(b, d, "dot");
    RealBuffer v(a.grid().points(), 0.0);
    for (int c = 0; c < d; ++c) {
        const auto& av = a.values(c);
        const auto& bv = b.values(c);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += av[i] * bv[i];
    }
    return SpectralField::from_values(a.grid(), std::move(v));
}

/// Pointwise vector-tensor contraction (g . T)_i = sum_j g_j T_{ji}.
inline SpectralField contract(const SpectralField& g, const SpectralField& tensor) {
    const int d = g.grid().dim();
    detail::require_components(g, d, "contract");
    detail::require_components(tensor, d * d, "contract");
    std::vector<RealBuffer> out(static_cast<std::size_t>(d), RealBuffer(g.grid().points(), 0.0));
    for (int i = 0; i < d; ++i) {
        auto& o = out[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
            const auto& gv = g.values(j);
            const auto& tv = tensor.values(j * d + i);
            for (std::size_t p = 0; p < o.size(); ++p) o[p] += gv[p] * tv[p];
        }
    }
    return SpectralField::from_values(g.grid(), std::move(out));
}

/// Pointwise transport derivative (u . grad) w for a scalar or vector w,
/// given the gradient of w (vector for scalar w, tensor for vector w).
inline SpectralField advect(const SpectralField& u, const SpectralField& grad_w) {
    const int d = u.grid().dim();
    detail::require_components(u, d, "advect");
    const int nc = grad_w.components() / d;
    if (nc * d != grad_w.components()) throw ShapeError("advect: gradient has incompatible component count");
    std::vector<RealBuffer> out(static_cast<std::size_t>(nc), RealBuffer(u.grid().points(), 0.0));
    for (int i = 0; i < nc; ++i) {
        auto& o = out[static_cast<std::size_t>(i)];
        for (int j = 0; j < d; ++j) {
            const auto& uv = u.values(j);
            const auto& gv = grad_w.values(i * d + j);
            for (std::size_t p = 0; p < o.size(); ++p) o[p] += uv[p] * gv[p];
        }
    }
    return SpectralField::from_values(u.grid(), std::move(out));
}

/// Pointwise outer product (a b^T)_{ij} = a_i b_j.
inline SpectralField outer(const SpectralField& a, const SpectralField& b) {
    const int d = a.grid().dim();
    detail::require_components(a, d, "outer");
    detail::require_components(b, d, "outer");
    std::vector<RealBuffer> out;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            RealBuffer v(a.grid().points());
            const auto& av = a.values(i);
            const auto& bv = b.values(j);
            for (std::size_t p = 0; p < v.size(); ++p) v[p] = av[p] * bv[p];
            out.push_back(std::move(v));
        }
    }
    return SpectralField::from_values(a.grid(), std::move(out));
}

}  // namespace qsw
