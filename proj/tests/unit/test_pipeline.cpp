#include <gtest/gtest.h>

#include <cmath>

#include "daxs/pipeline.hpp"
#include "daxs/simulate.hpp"
#include "daxs/synthetic.hpp"

using namespace daxs;

namespace {

ModelParams truth() {
    ModelParams p;
    const std::array<double, 8> t = {16, 20, 8, 10, 3, 5, 24, 5};
    for (std::size_t i = 0; i < 8; ++i) p.couplings.set_value(kAllCouplings[i], t[i]);
    p.offsets = {50, 30, 80, 120};
    return p;
}

// Every branch visible in the sim() window. Leaving S3 unseeded biases T1
// near eps -60, where the two sit one linewidth apart.
std::vector<BranchLabel> fitted_labels() {
    return {{Sector::triplet, 0, 0}, {Sector::triplet, 1, 0}, {Sector::singlet, 0, 0},
            {Sector::singlet, 1, 0}, {Sector::singlet, 2, 0}, {Sector::singlet, 3, 0}};
}

SimConfig sim() {
    SimConfig c;
    c.eps_axis = {-60, 1, 121};
    c.delta_axis = {-45, 0.5, 211};
    c.noise_sigma = 0.05;
    c.rng_seed = 3;
    return c;
}

}  // namespace

TEST(PipelineConfig, JsonRoundTripWithExtraction) {
    PipelineConfig c;
    c.fit.initial = truth();
    c.extraction.sg_window = 7;
    c.extraction.linewidth = 1.5;
    const auto j = pipeline_config_to_json(c);
    EXPECT_EQ(j["extraction"]["sg_window"], 7);
    const auto back = pipeline_config_from_json(j);
    EXPECT_EQ(back.extraction.sg_window, 7);
    EXPECT_EQ(back.fit.initial, truth());
    auto no_extraction = j;
    no_extraction.erase("extraction");
    EXPECT_EQ(pipeline_config_from_json(no_extraction).extraction.sg_window, 11);
}

TEST(Pipeline, FitAndOverlay) {
    const auto p = truth();
    const auto img = render_daxs_image(p, sim());
    const auto labels = fitted_labels();
    const auto seeds = seeds_from_model(p, img.x_axis(), labels, {.jitter = 0.3, .rng_seed = 1});
    PipelineConfig cfg;
    cfg.fit.initial = p;
    const auto run = run_fit(img, seeds, cfg);
    EXPECT_TRUE(run.fit.converged);
    for (const auto& t : run.extraction.tracks.tracks) ASSERT_TRUE(t.branch.has_value());
    EXPECT_NEAR(run.fit.scale, 1.0, 0.01);

    const auto overlay = fit_overlay(run.fit, seeds, img.x_axis());
    ASSERT_EQ(overlay.size(), labels.size());
    for (const auto& curve : overlay) {
        ASSERT_EQ(curve.points.size(), img.width());
        for (const auto& pt : curve.points) {
            const double truth_delta = sector_energies(p, pt.x).energy(curve.branch, 0);
            // Only where the branch is inside the image and so constrained by data.
            if (truth_delta < img.y_axis().min() + 6 || truth_delta > img.y_axis().max() - 6) continue;
            ASSERT_LT(std::fabs(pt.delta - truth_delta), 0.05 * 2.0) << curve.track_id << " x=" << pt.x;
        }
    }
    const auto j = overlay_to_json(overlay);
    EXPECT_EQ(j["curves"].size(), labels.size());
    EXPECT_EQ(j["curves"][0]["points"][0].size(), 2u);
}

TEST(Pipeline, OverlaySkipsUnboundCurves) {
    FitResult fit;
    fit.params = truth();
    SeedCurves seeds;
    seeds.curves.push_back({"lead", std::nullopt, {{0, 0}, {1, 1}}});
    seeds.curves.push_back({"S0", BranchLabel{Sector::singlet, 0, 0}, {{0, 0}, {1, 1}}});
    const auto o = fit_overlay(fit, seeds, Axis{"eps", "GHz", 0, 1, 4});
    ASSERT_EQ(o.size(), 1u);
    EXPECT_EQ(o[0].track_id, "S0");
}

TEST(Pipeline, SignCompareJson) {
    const auto p = truth();
    const auto img = render_daxs_image(p, sim());
    const auto labels = fitted_labels();
    const auto seeds = seeds_from_model(p, img.x_axis(), labels);
    PipelineConfig cfg;
    cfg.fit.initial = p;
    const auto run = run_sign_compare(img, seeds, cfg);
    const auto j = sign_comparison_to_json(run.comparison);
    EXPECT_EQ(j["positive"]["sign_class"], "a");
    EXPECT_EQ(j["mixed"]["sign_class"], "b");
    EXPECT_FALSE(j["percent_difference"].contains("t41"));
    EXPECT_TRUE(j["percent_difference"].contains("t11"));
    EXPECT_EQ(j["systematic_sigma"].size(), 8u);
}

TEST(Pipeline, AlignAverageOnShiftedScans) {
    // A lone t21 anticrossing at eps 30; other levels parked far away and
    // everything but its two branches rendered invisible.
    ModelParams p;
    p.couplings.set_value(Coupling::t21, 8);
    p.offsets = {100, 30, 100, 100};
    auto cfg = sim();
    cfg.noise_sigma = 0.0;
    for (const auto& b : branch_labels(0.0)) {
        cfg.visibility[b] = b.sector == Sector::triplet && b.index < 2 ? 1.0 : 0.0;
    }
    std::vector<SpectralImage> imgs;
    for (double off : {0.0, 1.0, -1.5}) {
        cfg.delta_offset = off;
        imgs.push_back(render_daxs_image(p, cfg));
    }
    const BranchLabel lower{Sector::triplet, 0, 0};
    SeedCurve ac{"ac", lower, {}};
    for (double x = 10; x <= 50; x += 2) ac.points.push_back({x, sector_energies(p, x).energy(lower, 0) + 0.2});
    const std::vector<std::string> ids = {"a", "b", "c"};
    const auto run = run_align_average(imgs, ids, ac, ExtractionConfig{});
    ASSERT_EQ(run.report.size(), 3u);
    EXPECT_EQ(run.report[1].shift[1], -2);
    EXPECT_EQ(run.report[2].shift[1], 3);
    ASSERT_EQ(run.hyperbolas.size(), 3u);
    EXPECT_NEAR(run.hyperbolas[0].eps0, 30.0, 0.1);
    for (std::size_t k = 1; k < 3; ++k) {
        EXPECT_NEAR(run.hyperbolas[k].eps0, run.hyperbolas[0].eps0, 1e-3);
    }
    // The tracker fits one Lorentzian in a window around the shared seed, so the
    // upper branch's tail biases each scan slightly differently: 2% of a pixel.
    EXPECT_NEAR(run.hyperbolas[1].vertex_delta() - run.hyperbolas[0].vertex_delta(), 1.0, 0.01);
    EXPECT_NEAR(run.hyperbolas[2].vertex_delta() - run.hyperbolas[0].vertex_delta(), -1.5, 0.01);
    // Aligned copies of one scene average back to the first image on the overlap.
    for (std::size_t iy = 0; iy < imgs[0].height(); ++iy) {
        for (std::size_t ix = 0; ix < imgs[0].width(); ++ix) {
            if (run.average.counts[iy * imgs[0].width() + ix] == 3) {
                ASSERT_NEAR(run.average.image.image.at(ix, iy), imgs[0].at(ix, iy), 1e-9);
            }
        }
    }
    const auto j = align_report_to_json(run);
    EXPECT_TRUE(j[0].contains("hyperbola"));
    EXPECT_THROW(run_align_average(std::span(imgs).first(1), std::span(ids).first(1), ac, ExtractionConfig{}),
                 InputError);
}
