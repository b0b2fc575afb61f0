#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "daxs/smoothing.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace daxs;

namespace {

double variance(const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - mean) * (x - mean);
    return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(Savgol, ClassicFiveTwoKernel) {
    // Tabulated 5-point quadratic smoothing weights: (-3, 12, 17, 12, -3) / 35.
    const auto w = savgol_weights(5, 2, 2);
    const std::array<double, 5> ref = {-3, 12, 17, 12, -3};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(w[i], ref[i] / 35.0, 1e-14);
}

TEST(Savgol, WeightsSumToOne) {
    for (int window : {3, 5, 11, 21})
        for (int order = 0; order < window && order <= 4; ++order)
            for (int pos = 0; pos < window; ++pos) {
                const auto w = savgol_weights(window, order, pos);
                EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
            }
}

TEST(Savgol, MatchesSlidingLeastSquaresOracle) {
    gen::Rng rng(501);
    std::vector<double> y(60);
    for (double& v : y) v = rng.normal(1.0);
    for (auto [window, order] : {std::pair{11, 2}, {7, 3}, {5, 0}, {9, 4}}) {
        const auto out = savgol_filter(y, window, order);
        for (int i = 0; i < 60; ++i) {
            ASSERT_NEAR(out[static_cast<std::size_t>(i)], oracle::local_poly_fit(y, window, order, i), 1e-10)
                << "window " << window << " order " << order << " i " << i;
        }
    }
}

TEST(Savgol, ConstantImageUnchanged) {
    SpectralImage img(Axis{"x", "u", 0, 1, 4}, Axis{"y", "u", 0, 1, 30});
    for (double& v : img.data()) v = 3.25;
    const auto out = smooth_columns(img, 11, 2);
    for (double v : out.data()) ASSERT_NEAR(v, 3.25, 1e-12);
    EXPECT_EQ(out.x_axis(), img.x_axis());
    EXPECT_EQ(out.y_axis(), img.y_axis());
}

TEST(Savgol, CubicReproducedExactly) {
    SpectralImage img(Axis{"x", "u", 0, 1, 2}, Axis{"y", "u", -2, 0.1, 41});
    for (std::size_t iy = 0; iy < 41; ++iy) {
        const double t = img.y_axis().at(iy);
        img.at(0, iy) = 0.5 * t * t * t - t * t + 2 * t - 1;
        img.at(1, iy) = -t * t * t;
    }
    const auto out = smooth_columns(img, 9, 3);
    for (std::size_t iy = 4; iy + 4 < 41; ++iy) {
        ASSERT_NEAR(out.at(0, iy), img.at(0, iy), 1e-9);
        ASSERT_NEAR(out.at(1, iy), img.at(1, iy), 1e-9);
    }
}

TEST(Savgol, WhiteNoiseVarianceDrops) {
    gen::Rng rng(502);
    std::vector<double> y(2000);
    for (double& v : y) v = rng.normal(1.0);
    const auto out = savgol_filter(y, 11, 2);
    std::vector<double> ref(y.size());
    for (int i = 0; i < static_cast<int>(y.size()); ++i) ref[static_cast<std::size_t>(i)] = oracle::local_poly_fit(y, 11, 2, i);
    for (std::size_t i = 0; i < y.size(); ++i) ASSERT_NEAR(out[i], ref[i], 1e-10);
    EXPECT_LT(variance(out), variance(y));
    // Interior noise gain of the 11/2 kernel is sum(w^2) ~ 0.21.
    EXPECT_LT(variance(out), 0.3 * variance(y));
}

TEST(Savgol, RejectsBadArguments) {
    SpectralImage img(Axis{"x", "u", 0, 1, 1}, Axis{"y", "u", 0, 1, 11});
    EXPECT_THROW(smooth_columns(img, 11, 2), InputError);
    EXPECT_THROW(smooth_columns(img, 4, 2), InputError);
    EXPECT_THROW(smooth_columns(img, 1, 0), InputError);
    EXPECT_THROW(smooth_columns(img, 5, 5), InputError);
    EXPECT_NO_THROW(smooth_columns(img, 9, 2));
}
