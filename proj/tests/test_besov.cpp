#include <cmath>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;

namespace {

SpectralField cos_mode(const Grid& g, double k) {
    return SpectralField::sample(g, [k](const Point& x) { return std::cos(k * x[0]); });
}

}  // namespace

TEST(Lp, NormalisationMatchesTheIntegral) {
    // |cos|_2^2 = pi and |cos|_4^4 = 3 pi / 4 on [0, 2 pi).
    const Grid g = make_grid(1, 256, two_pi);
    const auto u = cos_mode(g, 3.0);
    EXPECT_NEAR(lp_norm(u, 2.0), std::sqrt(M_PI), 1e-13);
    EXPECT_NEAR(lp_norm(u, 4.0), std::pow(0.75 * M_PI, 0.25), 1e-13);
    EXPECT_NEAR(lp_norm(u, inf), 1.0, 1e-15);
}

TEST(Besov, SingleModeZeroRegularityIsTheL2Norm) {
    // With s = 0, p = 2, r = 1 the block weights of one mode sum to one.
    const Grid g = make_grid(1, 256, two_pi);
    const auto f = build_dyadic_filter(g);
    for (double k : {1.0, 5.0, 17.0}) EXPECT_NEAR(besov_norm(f, cos_mode(g, k), {0.0, 2.0, 1.0}), std::sqrt(M_PI), 1e-12);
}

TEST(Besov, MeanIsInvisible) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 1);
    const BesovSpec spec{0.5, 3.0, 2.0};
    EXPECT_NEAR(besov_norm(f, u + 4.0, spec), besov_norm(f, u, spec), 1e-12 * besov_norm(f, u, spec));
}

TEST(Besov, Homogeneity) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 31);
    const BesovSpec spec{0.5, 3.0, 2.0};
    EXPECT_NEAR(besov_norm(f, -2.5 * u, spec), 2.5 * besov_norm(f, u, spec), 1e-12 * besov_norm(f, u, spec));
}

TEST(Besov, HybridWithEqualIndicesIsPlain) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 31);
    const BesovSpec spec{1.0, 2.0, 1.0};
    for (int l0 : {f.l_min() - 1, 1, f.l_max()}) {
        EXPECT_NEAR(hybrid_besov_norm(f, u, HybridBesovSpec::uniform(spec, l0)), besov_norm(f, u, spec),
                    1e-12 * besov_norm(f, u, spec));
    }
}

TEST(Besov, FrequencySplitRecomposes) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 6);
    const auto [lo, hi] = freq_split(f, u, 2);
    EXPECT_LE(relative_l2_difference(lo + hi, u), 1e-14);
}

TEST(Besov, RejectsBadIndices) {
    const Grid g = make_grid(1, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = cos_mode(g, 2.0);
    EXPECT_THROW(besov_norm(f, u, {0.0, 0.5, 1.0}), ConfigError);
    EXPECT_THROW(besov_norm(f, u, {0.0, 2.0, 0.0}), ConfigError);
}

TEST(CheminLerner, ConstantInTime) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 31);
    const BesovSpec spec{0.0, 2.0, 1.0};
    std::vector<Snapshot> snaps{{0.0, u}, {0.5, u}, {2.0, u}};
    const double b = besov_norm(f, u, spec);
    EXPECT_NEAR(time_besov_norm(f, snaps, inf, spec), b, 1e-12 * b);
    EXPECT_NEAR(time_besov_norm(f, snaps, 1.0, spec), 2.0 * b, 1e-12 * b);
}

TEST(CheminLerner, MinkowskiOrdering) {
    // The time norm inside the block sum is larger when rho >= r, smaller when rho <= r.
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u0 = random_band_limited(g, {}, 12);
    std::vector<Snapshot> snaps;
    for (int i = 0; i <= 8; ++i) {
        const double t = 0.125 * i;
        snaps.push_back({t, heat_multiplier(u0, 0.2, t)});
    }
    const BesovSpec r1{0.0, 2.0, 1.0}, r2{0.0, 2.0, 2.0};
    EXPECT_GE(time_besov_norm(f, snaps, 2.0, r1), plain_time_besov_norm(f, snaps, 2.0, r1) * (1.0 - 1e-12));
    EXPECT_LE(time_besov_norm(f, snaps, 1.0, r2), plain_time_besov_norm(f, snaps, 1.0, r2) * (1.0 + 1e-12));
    EXPECT_NEAR(time_besov_norm(f, snaps, 1.0, r1), plain_time_besov_norm(f, snaps, 1.0, r1),
                1e-12 * plain_time_besov_norm(f, snaps, 1.0, r1));
}

TEST(HeatCharacterization, SingleModeMatchesClosedForm) {
    // One mode at |xi| = k: the heat quantity is |u|_p (int t^{sr} e^{-r t k^2} dt/t)^{1/r}
    // = |u|_p k^{-2s} (Gamma(s r) / r^{s r})^{1/r}.
    const Grid g = make_grid(1, 256, two_pi);
    const auto f = build_dyadic_filter(g);
    const double k = 5.0, s = 0.5, r = 2.0;
    const auto u = cos_mode(g, k);
    const auto h = heat_characterization_ratio(f, u, s, 2.0, r, {0.0, 0.0, 64});
    const double expect = std::sqrt(M_PI) * std::pow(k, -2.0 * s) * std::pow(std::tgamma(s * r) / std::pow(r, s * r), 1.0 / r);
    EXPECT_NEAR(h.heat_quantity, expect, 1e-4 * expect);
}

TEST(HeatCharacterization, StableUnderRefinement) {
    auto ratio = [](int n) {
        const Grid g = make_grid(1, n, two_pi);
        return heat_characterization_ratio(build_dyadic_filter(g), cos_mode(g, 3.0), 0.5, 2.0, 2.0).ratio;
    };
    EXPECT_NEAR(ratio(128), ratio(512), 1e-6 * ratio(512));
}

TEST(HeatCharacterization, RandomFieldWithinTwoSidedBand) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto h = heat_characterization_ratio(build_dyadic_filter(g), random_band_limited(g, {}, 31), 0.5, 2.0, 2.0);
    EXPECT_GE(h.ratio, 0.1);
    EXPECT_LE(h.ratio, 10.0);
}
