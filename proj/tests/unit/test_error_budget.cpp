#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "daxs/error_budget.hpp"

using namespace daxs;

namespace {

struct Inputs {
    std::map<Coupling, ScanStats> random;
    std::map<Coupling, double> systematic;
    std::map<Coupling, bool> covered;
};

Inputs uniform_inputs(double mean, double rnd, double sys) {
    Inputs in;
    for (Coupling c : kAllCouplings) {
        in.random[c] = {mean, rnd};
        in.systematic[c] = sys;
        in.covered[c] = true;
    }
    return in;
}

ModelParams site_params() {
    ModelParams p;
    p.offsets = {50, 30, 80, 120};
    for (Coupling c : kAllCouplings) p.couplings.set_value(c, 4.0);
    return p;
}

}  // namespace

TEST(ErrorBudget, Quadrature) {
    auto in = uniform_inputs(20, 3, 4);
    const auto b = build_error_budget(in.random, in.systematic, in.covered);
    ASSERT_EQ(b.entries.size(), 8u);
    for (const auto& e : b.entries) {
        EXPECT_DOUBLE_EQ(e.total_sigma, 5.0);
        EXPECT_TRUE(e.reliable);
    }
    in = uniform_inputs(20, 3, 0);
    for (const auto& e : build_error_budget(in.random, in.systematic, in.covered).entries) {
        EXPECT_EQ(e.total_sigma, 3.0);
        EXPECT_GE(e.total_sigma, std::max(e.random_sigma, e.systematic_sigma));
    }
}

TEST(ErrorBudget, ReliabilityRules) {
    auto in = uniform_inputs(10, 3, 4);
    in.random[Coupling::t41] = {1.0, 0.9};       // ratio 0.9 / 1 after quadrature with 4 -> way above 0.5
    in.covered[Coupling::t31] = false;
    in.random[Coupling::t12] = {0.0, 0.0};
    in.systematic[Coupling::t12] = 0.0;
    in.random[Coupling::t22] = {10.0, 3.0};      // 5 / 10 = 0.5, at the limit
    const auto b = build_error_budget(in.random, in.systematic, in.covered);
    EXPECT_FALSE(b.find(Coupling::t41)->reliable);
    EXPECT_FALSE(b.find(Coupling::t31)->reliable);
    EXPECT_FALSE(b.find(Coupling::t31)->covered);
    EXPECT_FALSE(b.find(Coupling::t12)->reliable);
    EXPECT_TRUE(b.find(Coupling::t22)->reliable);
    const auto head = b.headline();
    EXPECT_EQ(head.size(), 5u);
    for (const auto& e : head) {
        EXPECT_NE(e.coupling, Coupling::t41);
        EXPECT_NE(e.coupling, Coupling::t31);
    }
}

TEST(ErrorBudget, InputErrors) {
    auto in = uniform_inputs(10, 1, 1);
    in.systematic[Coupling::t11] = -1;
    EXPECT_THROW(build_error_budget(in.random, in.systematic, in.covered), InputError);
    in = uniform_inputs(10, 1, 1);
    in.random[Coupling::t11].stddev = NAN;
    EXPECT_THROW(build_error_budget(in.random, in.systematic, in.covered), InputError);
    in = uniform_inputs(10, 1, 1);
    in.systematic.erase(Coupling::t42);
    EXPECT_THROW(build_error_budget(in.random, in.systematic, in.covered), InputError);
    in = uniform_inputs(10, 1, 1);
    EXPECT_THROW(build_error_budget(in.random, in.systematic, in.covered, 0.0), InputError);
}

TEST(ErrorBudget, Csv) {
    auto in = uniform_inputs(10, 3, 4);
    in.covered[Coupling::t41] = false;
    const auto csv = budget_to_csv(build_error_budget(in.random, in.systematic, in.covered));
    std::istringstream s(csv);
    std::string line;
    std::getline(s, line);
    EXPECT_EQ(line, "coupling,mean,random_sigma,systematic_sigma,total_sigma,reliable");
    std::getline(s, line);
    EXPECT_EQ(line, "t11,10,3,4,5,true");
    int rows = 1;
    while (std::getline(s, line)) {
        ++rows;
        if (line.rfind("t41,", 0) == 0) {
            EXPECT_EQ(line.substr(line.size() - 5), "false");
        }
    }
    EXPECT_EQ(rows, 8);
}

TEST(Anticrossing, Sites) {
    const auto p = site_params();
    const auto s21 = anticrossing_site(p, Coupling::t21);
    EXPECT_EQ(s21.eps, 30.0);
    EXPECT_EQ(s21.delta, 15.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t22).eps, -20.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t22).delta, 40.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t11).eps, 0.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t12).eps, -50.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t31).eps, 80.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t41).eps, 120.0);
    EXPECT_EQ(anticrossing_site(p, Coupling::t42).eps, 70.0);
    // The two diabatic levels meet at the site.
    for (Coupling c : kAllCouplings) {
        const auto s = anticrossing_site(p, c);
        const double l = left_level(c) == 2 ? p.offsets.l21 : 0.0;
        EXPECT_DOUBLE_EQ(s.delta, s.eps / 2 + l);
    }
}

TEST(Anticrossing, Coverage) {
    FitResult fit;
    fit.params = site_params();
    fit.scale = 1.0;
    fit.delta_offset = 1.0;
    PeakTracks tracks;
    // Point just below the t21 site (eps 30, delta 15 + offset 1).
    tracks.tracks.push_back({"T", BranchLabel{Sector::triplet, 0, 0}, {{31.0, 12.5, 0.1, 1, 2}}});
    tracks.tracks.push_back({"S", BranchLabel{Sector::singlet, 0, 0}, {{0.5, 1.0, 0.1, 1, 2}}});
    tracks.tracks.push_back({"U", std::nullopt, {{120.0, 61.0, 0.1, 1, 2}}});
    const auto cov = coverage_map(fit, tracks);
    EXPECT_TRUE(cov.at(Coupling::t21));
    EXPECT_TRUE(cov.at(Coupling::t11));
    EXPECT_FALSE(cov.at(Coupling::t41));  // only an unbound track reaches it
    EXPECT_FALSE(cov.at(Coupling::t22));
    // Same point but in the wrong sector does not count.
    tracks.tracks[0].branch = BranchLabel{Sector::singlet, 1, 0};
    EXPECT_FALSE(anticrossing_covered(fit, tracks, Coupling::t21));
}
