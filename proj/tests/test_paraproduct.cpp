#include <cmath>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;

TEST(Bony, IdentityOnRandomPairs) { EXPECT_LE(bony_identity_error(128, 100, 1000), 1e-12); }

TEST(Bony, IdentityInOneAndThreeDimensions) {
    for (const Grid& g : {make_grid(1, 256, two_pi), make_grid(3, 16, two_pi)}) {
        const auto f = build_dyadic_filter(g);
        const auto u = random_band_limited(g, {}, 3) + 0.5;
        const auto v = random_band_limited(g, {}, 4);
        const auto b = bony_decompose(f, u, v);
        EXPECT_LE(relative_l2_difference(b.Tuv + b.Tvu + b.Ruv, dealiased_multiply(u, v)), 1e-12);
    }
}

TEST(Paraproduct, ConstantActsAsMultiplier) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto v = random_band_limited(g, {}, 5) + 1.0;
    const auto c = SpectralField::zeros(g) + 2.0;
    EXPECT_LE(relative_l2_difference(para(f, c, v), 2.0 * (v - v.mean())), 1e-12);
}

TEST(Paraproduct, SeparatedBandsLeaveOnlyTheMeanInTheRemainder) {
    // u lives on levels -1..0, v on levels 3..4: no diagonal interaction.
    const Grid g = make_grid(1, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = SpectralField::sample(g, [](const Point& x) { return 0.3 + std::cos(x[0]); });
    const auto v = SpectralField::sample(g, [](const Point& x) { return -0.2 + std::sin(17.0 * x[0]); });
    const auto r = remainder(f, u, v);
    const auto expect = SpectralField::zeros(g) + (0.3 * -0.2);
    EXPECT_LE(relative_l2_difference(r, expect), 1e-13);
    // T_u v carries the low-high interaction, T_v u only the mean of v.
    EXPECT_LE(relative_l2_difference(para(f, v, u), -0.2 * (u - u.mean())), 1e-13);
}

TEST(Paraproduct, OperatorIsAsymmetric) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    RandomFieldSpec low;
    low.kmax = 3;
    const auto u = random_band_limited(g, low, 1);
    const auto v = random_band_limited(g, {}, 2);
    EXPECT_GT(relative_l2_difference(para(f, u, v), para(f, v, u)), 1e-2);
}

TEST(ProductLaw, RatioIsInvariantUnderRescaling) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 7);
    const auto v = random_band_limited(g, {}, 8);
    const BesovSpec b{1.0, 2.0, 1.0};
    const double a = product_law_ratio(f, u, v, b, b, b).value;
    const double c = product_law_ratio(f, 3.7 * u, v, b, b, b).value;
    EXPECT_NEAR(a, c, 1e-12 * a);
}

TEST(ProductLaw, ConstantFactorUsesTheOtherTermOnly) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 7);
    const auto v = SpectralField::zeros(g) + 2.0;
    const BesovSpec b{1.0, 2.0, 1.0};
    const auto r = product_law_ratio(f, u, v, b, b, b);
    // |2u|_B / (|u|_inf * 0 + 2 |u|_B) = 1.
    EXPECT_FALSE(r.degenerate);
    EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(Composition, LinearisesAtSmallAmplitude) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    auto u = random_band_limited(g, {}, 9);
    u = u * (1e-4 / lp_norm(u, inf));
    EXPECT_NEAR(composition_ratio(f, u, 1.0, 2.0).value, 1.0, 1e-2);
}

TEST(Composition, RejectsLargeData) {
    const Grid g = make_grid(1, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = SpectralField::sample(g, [](const Point& x) { return 3.0 * std::sin(x[0]); });
    EXPECT_THROW(composition_ratio(f, u, 1.0, 2.0), ConfigError);
}

TEST(Estimates, FreshSeedsStayWithinTheFrozenConstants) {
    const auto fresh = sweep_estimate_maxima(fresh_first_seed, fresh_seed_count);
    const auto& frozen = frozen_estimate_maxima();
    ASSERT_EQ(fresh.size(), frozen.size());
    for (const auto& [name, value] : frozen) {
        ASSERT_TRUE(fresh.count(name)) << name;
        EXPECT_LE(fresh.at(name), estimate_margin * value) << name;
    }
}

TEST(Estimates, SweepIsDeterministic) {
    const auto a = estimate_ratios(1000);
    const auto b = estimate_ratios(1000);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].ratio, b[i].ratio) << a[i].name;
}
