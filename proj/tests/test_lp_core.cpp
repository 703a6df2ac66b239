#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "qsw/qsw.hpp"

using namespace qsw;

TEST(Grid, RejectsNonPowerOfTwo) {
    EXPECT_THROW(make_grid(2, 48, 1.0), ConfigError);
    EXPECT_THROW(make_grid(4, 16, 1.0), ConfigError);
    EXPECT_THROW(make_grid(2, 16, -1.0), ConfigError);
}

TEST(Fft, RoundTripIsExact) {
    const Grid g = make_grid(2, 32, 3.0);
    const auto u = random_band_limited(g, {}, 4);
    const auto v = SpectralField::from_coeffs(g, u.all_coeffs());
    double e = 0.0;
    for (std::size_t i = 0; i < g.points(); ++i) e = std::max(e, std::abs(u.values()[i] - v.values()[i]));
    EXPECT_LE(e, 1e-14);
}

TEST(Dyadic, PartitionOfUnity) {
    EXPECT_LE(partition_error(make_grid(1, 1024, two_pi)), 1e-10);
    EXPECT_LE(partition_error(make_grid(2, 128, 64.0)), 1e-10);
    EXPECT_LE(partition_error(make_grid(3, 32, two_pi)), 1e-10);
}

TEST(Dyadic, ZeroModeBelongsToNoBlock) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    EXPECT_EQ(f.level_sum(f.l_min(), f.l_max())[0], 0.0);
    const auto c = SpectralField::zeros(g) + 3.0;
    for (int l = f.l_min(); l <= f.l_max(); ++l) EXPECT_EQ(dyadic_block(f, c, l).max_abs(), 0.0);
}

TEST(Dyadic, ReconstructionDropsTheMean) {
    EXPECT_LE(reconstruction_error(make_grid(1, 512, two_pi), 10, 11), 1e-10);
    EXPECT_LE(reconstruction_error(make_grid(2, 128, 10.0), 10, 21), 1e-10);
}

TEST(Dyadic, AlmostOrthogonality) { EXPECT_EQ(orthogonality_defect(make_grid(2, 128, two_pi)), 0.0); }

TEST(Dyadic, BlocksLiveInTheirAnnulus) {
    // Bernstein: |grad Delta_l u|_2 / |Delta_l u|_2 lies in [3/4, 8/3] 2^l.
    const Grid g = make_grid(2, 128, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 8);
    for (int l = f.l_min(); l <= f.l_max(); ++l) {
        const auto b = dyadic_block(f, u, l);
        const double n = lp_norm(b, 2.0);
        if (n == 0.0) continue;
        const double r = lp_norm(grad(b), 2.0) / n / std::ldexp(1.0, l);
        EXPECT_GE(r, annulus_inner) << "level " << l;
        EXPECT_LE(r, annulus_outer) << "level " << l;
    }
}

TEST(Dyadic, LowSumTelescopes) {
    const Grid g = make_grid(2, 64, two_pi);
    const auto f = build_dyadic_filter(g);
    const auto u = random_band_limited(g, {}, 2);
    const int l = f.l_min() + 2;
    const auto lhs = low_sum(f, u, l + 1) - low_sum(f, u, l);
    EXPECT_LE(relative_l2_difference(lhs, dyadic_block(f, u, l)), 1e-13);
    EXPECT_THROW(low_sum(f, u, f.l_max() + 2), ConfigError);
}

TEST(Dyadic, RejectsUnresolvedLevels) {
    const Grid g = make_grid(2, 32, two_pi);
    EXPECT_THROW(build_dyadic_filter(g, 0, DyadicFilter::top_level(g) + 1), ConfigError);
}

TEST(Dealias, ProductOfBandLimitedFieldsIsUnaliased) {
    // cos(a x) cos(b x) = (cos((a-b)x) + cos((a+b)x)) / 2 when a + b is retained.
    const Grid g = make_grid(1, 64, two_pi);
    const auto u = SpectralField::sample(g, [](const Point& x) { return std::cos(9.0 * x[0]); });
    const auto v = SpectralField::sample(g, [](const Point& x) { return std::cos(11.0 * x[0]); });
    const auto w = SpectralField::sample(g, [](const Point& x) { return 0.5 * (std::cos(2.0 * x[0]) + std::cos(20.0 * x[0])); });
    EXPECT_LE(relative_l2_difference(dealiased_multiply(u, v), w), 1e-14);
}

TEST(FieldIo, RoundTripIsBitExact) {
    const Grid g = make_grid(2, 16, 5.0);
    const auto u = random_band_limited(g, {2, 0, 1.0}, 3);
    const auto dir = std::filesystem::temp_directory_path() / "qsw_field_io_test";
    std::filesystem::remove_all(dir);
    write_field(dir, "u", u, 1.25);
    const auto d = read_field(dir, "u");
    EXPECT_EQ(d.time, 1.25);
    ASSERT_EQ(d.field.components(), 2);
    EXPECT_TRUE(d.field.grid() == g);
    for (int c = 0; c < 2; ++c) EXPECT_EQ(d.field.values(c), u.values(c));
    std::filesystem::remove_all(dir);
}
