#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <tuple>
#include <vector>

#include "qsw/grid.hpp"

namespace qsw {

using cplx = std::complex<double>;

/// Allocator handing out fftw_malloc'd (SIMD aligned) storage, so every buffer
/// matches the alignment the cached plans were created with.
template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() noexcept = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}

    T* allocate(std::size_t count) {
        void* p = fftw_malloc(count * sizeof(T));
        if (p == nullptr && count != 0) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
    template <class U>
    bool operator!=(const FftwAllocator<U>&) const noexcept { return false; }
};

using RealBuffer = std::vector<double, FftwAllocator<double>>;
using ComplexBuffer = std::vector<cplx, FftwAllocator<cplx>>;

namespace detail {

// Plans are created once per (dim, n) with FFTW_ESTIMATE: estimate plans are
// reproducible across runs, which keeps outputs bit-identical for a fixed seed.
struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    PlanPair get(int dim, int n) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(dim, n);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;

        int dims[3] = {n, n, n};
        std::size_t real_count = 1;
        for (int i = 0; i < dim; ++i) real_count *= static_cast<std::size_t>(n);
        const std::size_t spec_count = real_count / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
        RealBuffer r(real_count);
        ComplexBuffer c(spec_count);
        PlanPair p;
        p.forward = fftw_plan_dft_r2c(dim, dims, r.data(), reinterpret_cast<fftw_complex*>(c.data()), FFTW_ESTIMATE);
        p.inverse = fftw_plan_dft_c2r(dim, dims, reinterpret_cast<fftw_complex*>(c.data()), r.data(),
                                      FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.inverse);
        }
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int>, PlanPair> plans_;
};

}  // namespace detail

/// Forward transform of real samples into normalised coefficients
/// c_k = (1/N) sum_j u_j exp(-i k.x_j).
inline ComplexBuffer forward_fft(const Grid& grid, const RealBuffer& values) {
    if (values.size() != grid.points()) throw ShapeError("forward_fft: sample count does not match grid");
    auto plan = detail::PlanCache::instance().get(grid.dim(), grid.n());
    RealBuffer in(values);
    ComplexBuffer out(grid.modes());
    fftw_execute_dft_r2c(plan.forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / static_cast<double>(grid.points());
    for (auto& c : out) c *= scale;
    return out;
}

/// Inverse of forward_fft.
inline RealBuffer inverse_fft(const Grid& grid, const ComplexBuffer& coeffs) {
    if (coeffs.size() != grid.modes()) throw ShapeError("inverse_fft: coefficient count does not match grid");
    auto plan = detail::PlanCache::instance().get(grid.dim(), grid.n());
    ComplexBuffer in(coeffs);
    RealBuffer out(grid.points());
    fftw_execute_dft_c2r(plan.inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

}  // namespace qsw
