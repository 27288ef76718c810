#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "flrw_blowup/io.hpp"
#include "flrw_blowup/numeric.hpp"

using namespace flrw;

TEST(Numeric, UnitBallVolumes) {
    EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-15);
    EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-15);
    EXPECT_NEAR(unit_ball_volume(3), 4.0 * std::numbers::pi / 3.0, 1e-14);
    EXPECT_NEAR(unit_sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
}

TEST(Numeric, PowNonnegHandlesZero) {
    EXPECT_EQ(pow_nonneg(0.0, 2.5), 0.0);
    EXPECT_NEAR(pow_nonneg(4.0, 0.5), 2.0, 1e-15);
}

TEST(Numeric, GridExtremumFindsInteriorMinimum) {
    const auto ext = grid_extremum([](double t) { return (t - 3.0) * (t - 3.0) + 1.0; }, kInf, Sense::Minimize);
    EXPECT_NEAR(ext.arg, 3.0, 1e-6);
    EXPECT_NEAR(ext.value, 1.0, 1e-12);
}

TEST(Numeric, GridExtremumOnFiniteHorizonMaximum) {
    const auto ext = grid_extremum([](double t) { return std::sin(t); }, 3.0, Sense::Maximize);
    EXPECT_NEAR(ext.value, 1.0, 1e-12);
    EXPECT_NEAR(ext.arg, std::numbers::pi / 2.0, 1e-5);
}

TEST(Numeric, GridExtremumReachesInfiniteLimit) {
    const auto ext = grid_extremum([](double t) { return -t; }, kInf, Sense::Minimize);
    EXPECT_LT(ext.value, -1e11);
}

TEST(Io, ShortestRoundTrip) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(kInf), "inf");
    EXPECT_EQ(format_double(-kInf), "-inf");
    EXPECT_EQ(format_double(std::nan("")), "nan");
    const double x = 1.0 / 3.0;
    EXPECT_EQ(std::stod(format_double(x)), x);
}
