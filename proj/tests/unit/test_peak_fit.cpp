#include <gtest/gtest.h>

#include <cmath>

#include "daxs/model.hpp"
#include "daxs/peak_fit.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace daxs;

namespace {

std::vector<double> grid(double lo, double step, std::size_t n) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = lo + step * static_cast<double>(i);
    return d;
}

}  // namespace

TEST(PeakFit, SingleNoiseFreeLorentzian) {
    gen::Rng rng(601);
    const auto d = grid(-15, 0.1, 301);
    for (int k = 0; k < 20; ++k) {
        const double c = rng.uniform(-5, 5), w = rng.uniform(1.0, 3.0), a = rng.uniform(0.5, 2);
        std::vector<double> y(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) y[i] = oracle::lorentz(d[i], c, w, a) + 0.1;
        const double seed = c + rng.uniform(-0.9, 0.9) * 2.0;
        const auto fit = fit_column_peaks(d, y, std::vector<double>{seed}, {});
        ASSERT_TRUE(fit.converged);
        ASSERT_EQ(fit.peaks.size(), 1u);
        EXPECT_NEAR(fit.peaks[0].center, c, 1e-6);
        EXPECT_NEAR(fit.peaks[0].width, w, 1e-6);
        EXPECT_NEAR(fit.peaks[0].amplitude, a, 1e-6);
        EXPECT_NEAR(fit.baseline, 0.1, 1e-6);
        EXPECT_GT(fit.peaks[0].center_sigma, 0.0);
        EXPECT_FALSE(fit.peaks[0].width_at_bound);
    }
}

TEST(PeakFit, TwoSeparatedPeaksKeepSeedOrder) {
    const auto d = grid(-30, 0.1, 601);
    std::vector<double> y(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = oracle::lorentz(d[i], -10, 2, 1) + oracle::lorentz(d[i], 10, 2, 0.7);
    const auto fit = fit_column_peaks(d, y, std::vector<double>{10.8, -9.5}, {});
    ASSERT_EQ(fit.peaks.size(), 2u);
    EXPECT_NEAR(fit.peaks[0].center, 10, 1e-3);
    EXPECT_NEAR(fit.peaks[1].center, -10, 1e-3);
    EXPECT_NEAR(fit.peaks[0].amplitude, 0.7, 1e-3);
}

TEST(PeakFit, WidthClampedAndFlagged) {
    const auto d = grid(-20, 0.05, 801);
    std::vector<double> y(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = oracle::lorentz(d[i], 1.0, 6.0, 1);
    ColumnFitOptions opts;
    opts.width_bounds = {0.5, 2.0};
    opts.initial_width = 10.0;
    const auto fit = fit_column_peaks(d, y, std::vector<double>{1.0}, opts);
    EXPECT_NEAR(fit.peaks[0].width, 2.0, 1e-9);
    EXPECT_TRUE(fit.peaks[0].width_at_bound);
}

TEST(PeakFit, NoisyFitUncertaintyIsCalibrated) {
    // Spread of fitted centres over noise draws should match the reported sigma.
    gen::Rng rng(602);
    const auto d = grid(-15, 0.25, 121);
    std::vector<double> centers, sigmas;
    for (int k = 0; k < 200; ++k) {
        std::vector<double> y(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) y[i] = oracle::lorentz(d[i], 0.3, 2, 1) + rng.normal(0.05);
        const auto fit = fit_column_peaks(d, y, std::vector<double>{0.0}, {});
        centers.push_back(fit.peaks[0].center);
        sigmas.push_back(fit.peaks[0].center_sigma);
    }
    double mean = 0, var = 0, sig = 0;
    for (double c : centers) mean += c / 200;
    for (double c : centers) var += (c - mean) * (c - mean) / 199;
    for (double s : sigmas) sig += s / 200;
    EXPECT_NEAR(mean, 0.3, 0.01);
    EXPECT_NEAR(std::sqrt(var) / sig, 1.0, 0.2);
}

TEST(PeakFit, FixedBaseline) {
    const auto d = grid(-10, 0.1, 201);
    std::vector<double> y(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) y[i] = oracle::lorentz(d[i], 2, 2, 1) + 0.5;
    ColumnFitOptions opts;
    opts.baseline = BaselineMode::fixed;
    opts.fixed_baseline = 0.5;
    const auto fit = fit_column_peaks(d, y, std::vector<double>{1.5}, opts);
    EXPECT_EQ(fit.baseline, 0.5);
    EXPECT_NEAR(fit.peaks[0].center, 2, 1e-6);
}

TEST(PeakFit, InputErrors) {
    const auto d = grid(0, 1, 10);
    const std::vector<double> y(10, 1.0);
    EXPECT_THROW(fit_column_peaks(d, y, std::vector<double>{}, {}), InputError);
    EXPECT_THROW(fit_column_peaks(d, y, std::vector<double>{12.0}, {}), InputError);
    EXPECT_THROW(fit_column_peaks(d, std::vector<double>(9), std::vector<double>{2.0}, {}), InputError);
    ColumnFitOptions bad;
    bad.width_bounds = {2, 1};
    EXPECT_THROW(fit_column_peaks(d, y, std::vector<double>{2.0}, bad), InputError);
}
