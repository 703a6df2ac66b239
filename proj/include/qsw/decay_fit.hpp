#pragma once

// Power-law decay fits for time series: slope of log(value - floor) against
// log(1 + t) over a window, with the long-time plateau removed first.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "qsw/error.hpp"
#include "qsw/quasi_solution.hpp"

namespace qsw {

struct DecayWindow {
    double t0 = 2.0;
    double t1 = 20.0;
};

enum class FloorMode {
    /// Mean of the samples in [tail_start, tail_end].
    tail_mean,
    /// A caller-supplied value.
    fixed,
    none,
};

inline const char* to_string(FloorMode m) {
    switch (m) {
        case FloorMode::tail_mean: return "tail_mean";
        case FloorMode::fixed: return "fixed";
        case FloorMode::none: return "none";
    }
    return "?";
}

struct FloorOptions {
    FloorMode mode = FloorMode::tail_mean;
    /// Tail bounds; a negative tail_start means "after the window".
    double tail_start = -1.0;
    double tail_end = inf;
    double value = 0.0;
};

struct DecayReport {
    std::string norm;
    DecayWindow window;
    double fitted = 0.0;
    double expected = 0.0;
    double relative_error = 0.0;
    double tolerance = 0.0;
    double floor = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

inline constexpr std::size_t min_fit_samples = 5;

/// Plateau estimate of a series per the floor options.
inline double plateau(const std::vector<double>& t, const std::vector<double>& v, const DecayWindow& w,
                      const FloorOptions& f) {
    if (f.mode == FloorMode::none) return 0.0;
    if (f.mode == FloorMode::fixed) return f.value;
    const double start = f.tail_start < 0.0 ? w.t1 : f.tail_start;
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const bool after = f.tail_start < 0.0 ? t[i] > start : t[i] >= start;
        if (after && t[i] <= f.tail_end) {
            acc += v[i];
            ++count;
        }
    }
    if (count == 0) throw DiagnosticError("no tail samples to estimate the plateau from");
    return acc / static_cast<double>(count);
}

/// Fits value ~ C (1 + t)^(-k) on the window after subtracting the floor.
inline DecayReport fit_decay(const std::vector<double>& t, const std::vector<double>& v, const std::string& norm,
                             const DecayWindow& w, double expected, double tolerance, const FloorOptions& f = {}) {
    if (t.size() != v.size()) throw ShapeError("time and value series differ in length");
    if (!(w.t1 > w.t0)) throw ConfigError("decay window must have t1 > t0");
    DecayReport r;
    r.norm = norm;
    r.window = w;
    r.expected = expected;
    r.tolerance = tolerance;
    r.floor = plateau(t, v, w, f);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < w.t0 || t[i] > w.t1) continue;
        const double s = v[i] - r.floor;
        if (!(s > 0.0)) throw DiagnosticError("floor >= signal at t = " + std::to_string(t[i]) + " in " + norm);
        x.push_back(std::log1p(t[i]));
        y.push_back(std::log(s));
    }
    r.samples = x.size();
    if (r.samples < min_fit_samples) throw DiagnosticError("decay window holds fewer than 5 samples");
    r.fitted = -least_squares_slope(x, y);
    r.relative_error = expected != 0.0 ? std::abs(r.fitted - expected) / std::abs(expected) : std::abs(r.fitted);
    r.pass = r.relative_error <= tolerance;
    return r;
}

}  // namespace qsw
