#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "daxs/simulate.hpp"
#include "daxs/synthetic.hpp"
#include "daxs/tracks.hpp"
#include "generators.hpp"

using namespace daxs;

namespace {

ModelParams scene_params() {
    ModelParams p;
    p.couplings.set_value(Coupling::t11, 12);
    p.couplings.set_value(Coupling::t12, 9);
    p.couplings.set_value(Coupling::t21, 6);
    p.couplings.set_value(Coupling::t22, 8);
    p.couplings.set_value(Coupling::t31, 4);
    p.couplings.set_value(Coupling::t32, 5);
    p.couplings.set_value(Coupling::t41, 10);
    p.couplings.set_value(Coupling::t42, 5);
    p.offsets = {50, 30, 80, 120};
    return p;
}

SimConfig one_branch_config(const BranchLabel& label) {
    SimConfig c;
    c.eps_axis = {-40, 1, 81};
    c.delta_axis = {-80, 0.25, 641};
    for (const auto& l : branch_labels(0.0)) c.visibility[l] = 0.0;
    c.visibility[label] = 1.0;
    return c;
}

SeedCurves single_seed(const ModelParams& p, const Axis& x, const BranchLabel& label, double jitter,
                       std::uint64_t seed) {
    const std::vector<BranchLabel> labels = {label};
    return seeds_from_model(p, x, labels, {.vertex_spacing = 5, .jitter = jitter, .rng_seed = seed});
}

}  // namespace

TEST(Seeds, Validation) {
    SeedCurves s;
    s.curves.push_back({"a", std::nullopt, {{0, 1}, {1, 2}}});
    EXPECT_NO_THROW(validate(s));
    s.curves.push_back({"a", std::nullopt, {{0, 1}, {1, 2}}});
    EXPECT_THROW(validate(s), InputError);
    s.curves.back().track_id = "b";
    s.curves.back().points = {{0, 1}};
    EXPECT_THROW(validate(s), InputError);
    s.curves.back().points = {{0, 1}, {0, 2}};
    EXPECT_THROW(validate(s), InputError);
}

TEST(Seeds, LinearInterpolation) {
    const SeedCurve c{"a", std::nullopt, {{0, 0}, {2, 4}, {3, 0}}};
    EXPECT_DOUBLE_EQ(c.delta_at(1.0), 2.0);
    EXPECT_DOUBLE_EQ(c.delta_at(2.5), 2.0);
    EXPECT_DOUBLE_EQ(c.delta_at(3.0), 0.0);
}

TEST(Seeds, JsonRoundTrip) {
    SeedCurves s;
    s.curves.push_back({"T0", BranchLabel{Sector::triplet, 0, 1}, {{-1.5, 2.25}, {3, 0.1}}});
    s.curves.push_back({"lead", std::nullopt, {{0, 1}, {1, 2}}});
    const auto j = seeds_to_json(s);
    EXPECT_EQ(j["format"], "daxs-seeds");
    EXPECT_TRUE(j["curves"][1]["branch"].is_null());
    const auto back = seeds_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(back.curves.size(), 2u);
    EXPECT_EQ(back.curves[0].branch, s.curves[0].branch);
    EXPECT_EQ(back.curves[0].points[0].delta, 2.25);
    EXPECT_EQ(seeds_to_json(back), j);
    auto bad = j;
    bad["curves"][0]["points"][0] = {1.0};
    EXPECT_THROW(seeds_from_json(bad), InputError);
}

TEST(TracksCsv, RoundTrip) {
    PeakTracks t;
    t.tracks.push_back({"T0", std::nullopt, {{1.0, 2.5, 0.01, 1.2, 2.0}, {2.0, 0.1 + 0.2, 1e-5, 0.9, 1.9}}});
    t.tracks.push_back({"S1", std::nullopt, {{-3.0, -7.125, 0.5, 1.0, 2.5}}});
    const auto csv = tracks_to_csv(t);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "track_id,x,delta,delta_sigma,amplitude,width");
    std::istringstream in(csv);
    const auto back = read_tracks_csv(in);
    ASSERT_EQ(back.tracks.size(), 2u);
    EXPECT_EQ(back.tracks[0].points[1].delta, 0.1 + 0.2);
    EXPECT_EQ(back.total_points(), 3u);
    std::istringstream bad("track_id,x\nT0,1\n");
    EXPECT_THROW(read_tracks_csv(bad), InputError);
}

TEST(Extract, EmptySeedsGiveEmptyTracks) {
    const auto img = render_daxs_image(scene_params(), one_branch_config({Sector::singlet, 0, 0}));
    const auto r = extract_tracks(img, SeedCurves{}, ExtractionConfig{});
    EXPECT_TRUE(r.tracks.tracks.empty());
    EXPECT_EQ(r.tracks.total_points(), 0u);
}

TEST(Extract, SeedOutsideImageWarns) {
    const auto img = render_daxs_image(scene_params(), one_branch_config({Sector::singlet, 0, 0}));
    SeedCurves s;
    s.curves.push_back({"far", std::nullopt, {{500, 0}, {600, 0}}});
    const auto r = extract_tracks(img, s, ExtractionConfig{});
    ASSERT_EQ(r.tracks.tracks.size(), 1u);
    EXPECT_TRUE(r.tracks.tracks[0].points.empty());
    ASSERT_EQ(r.warnings.size(), 1u);
}

TEST(Extract, SingleBranchWithinTwentiethOfLinewidth) {
    const auto p = scene_params();
    for (const BranchLabel label : {BranchLabel{Sector::singlet, 1, 0}, BranchLabel{Sector::triplet, 0, 0}}) {
        const auto cfg = one_branch_config(label);
        const auto img = render_daxs_image(p, cfg);
        const auto seeds = single_seed(p, img.x_axis(), label, 0.3, 5);
        const auto r = extract_tracks(img, seeds, ExtractionConfig{});
        const auto& track = r.tracks.tracks.at(0);
        std::size_t expected = 0;
        for (std::size_t ix = 0; ix < img.width(); ++ix) {
            const double e = sector_energies(p, img.x_axis().at(ix)).energy(label, 0);
            if (img.y_axis().contains(e) && e > img.y_axis().min() + 6 && e < img.y_axis().max() - 6) ++expected;
        }
        EXPECT_GE(track.points.size(), expected) << to_string(label);
        for (const auto& pt : track.points) {
            const double truth = sector_energies(p, pt.x).energy(label, 0);
            EXPECT_LT(std::fabs(pt.delta - truth), 0.05 * 2.0) << to_string(label) << " x=" << pt.x;
            EXPECT_GT(pt.delta_sigma, 0.0);
            EXPECT_GE(pt.width, 0.5);
            EXPECT_LE(pt.width, 8.0);
        }
    }
}

TEST(Extract, CloseBranchesAreFlaggedNotSwapped) {
    ModelParams p;
    p.offsets = {100, 5, 100, 100};
    p.couplings.set_value(Coupling::t21, 0.3);
    SimConfig cfg;
    cfg.eps_axis = {-20, 0.5, 101};
    cfg.delta_axis = {-30, 0.1, 601};
    for (const auto& l : branch_labels(0.0)) cfg.visibility[l] = 0.0;
    const std::vector<BranchLabel> labels = {{Sector::triplet, 0, 0}, {Sector::triplet, 1, 0}};
    for (const auto& l : labels) cfg.visibility[l] = 1.0;
    const auto img = render_daxs_image(p, cfg);
    const auto seeds = seeds_from_model(p, img.x_axis(), labels, {.vertex_spacing = 0.5});
    const auto r = extract_tracks(img, seeds, ExtractionConfig{});

    int merged = 0;
    for (const auto& rej : r.rejected) {
        if (rej.reason == RejectReason::merged) {
            ++merged;
            EXPECT_LT(std::fabs(rej.x - 5.0), 5.0);
        }
    }
    EXPECT_GE(merged, 2);
    for (std::size_t k = 0; k < 2; ++k) {
        for (const auto& pt : r.tracks.tracks[k].points) {
            const auto e = sector_energies(p, pt.x);
            const double own = e.triplet[k], other = e.triplet[1 - k];
            EXPECT_LT(std::fabs(pt.delta - own), std::fabs(pt.delta - other)) << "x=" << pt.x;
        }
    }
}

TEST(Extract, EveryPointFromAConvergedFitAndOnePerColumn) {
    const auto p = scene_params();
    SimConfig cfg;
    cfg.eps_axis = {-40, 1, 81};
    cfg.delta_axis = {-60, 0.5, 281};
    cfg.noise_sigma = 0.1;
    cfg.rng_seed = 3;
    const auto img = render_daxs_image(p, cfg);
    const std::vector<BranchLabel> labels = {{Sector::singlet, 0, 0}, {Sector::singlet, 1, 0}, {Sector::triplet, 0, 0}};
    const auto seeds = seeds_from_model(p, img.x_axis(), labels, {.jitter = 0.3, .rng_seed = 2});
    const auto r = extract_tracks(img, seeds, ExtractionConfig{});
    for (const auto& t : r.tracks.tracks) {
        for (std::size_t i = 1; i < t.points.size(); ++i) ASSERT_LT(t.points[i - 1].x, t.points[i].x);
        for (const auto& pt : t.points) {
            ASSERT_GT(pt.delta_sigma, 0.0);
            ASSERT_TRUE(std::isfinite(pt.delta_sigma));
        }
    }
}

// Properties

TEST(ExtractProperty, TranslationEquivariance) {
    const auto p = scene_params();
    const BranchLabel label{Sector::singlet, 2, 0};
    auto cfg = one_branch_config(label);
    const auto img = render_daxs_image(p, cfg);
    const auto seeds = single_seed(p, img.x_axis(), label, 0.4, 9);
    const auto base = extract_tracks(img, seeds, ExtractionConfig{});
    for (int k : {-3, 2, 7}) {
        const double shift = k * cfg.delta_axis.step;
        auto shifted_cfg = cfg;
        shifted_cfg.delta_offset = shift;
        const auto shifted_img = render_daxs_image(p, shifted_cfg);
        SeedCurves shifted_seeds = seeds;
        for (auto& pt : shifted_seeds.curves[0].points) pt.delta += shift;
        const auto moved = extract_tracks(shifted_img, shifted_seeds, ExtractionConfig{});
        const auto& a = base.tracks.tracks[0].points;
        const auto& b = moved.tracks.tracks[0].points;
        std::size_t matched = 0;
        for (const auto& pa : a) {
            for (const auto& pb : b) {
                if (pb.x != pa.x) continue;
                ++matched;
                ASSERT_NEAR(pb.delta - pa.delta, shift, 1e-6) << "k=" << k << " x=" << pa.x;
            }
        }
        EXPECT_GT(matched, a.size() * 9 / 10);
    }
}

TEST(ExtractProperty, SeedPerturbationBelowHalfLinewidth) {
    const auto p = scene_params();
    const BranchLabel label{Sector::triplet, 1, 0};
    const auto cfg = one_branch_config(label);
    const auto img = render_daxs_image(p, cfg);
    const auto exact = single_seed(p, img.x_axis(), label, 0.0, 0);
    const auto ref = extract_tracks(img, exact, ExtractionConfig{});
    gen::Rng rng(701);
    for (int trial = 0; trial < 10; ++trial) {
        SeedCurves moved = exact;
        const double d = rng.uniform(-0.99, 0.99) * 1.0;  // |d| < Gamma / 2
        for (auto& pt : moved.curves[0].points) pt.delta += d;
        const auto r = extract_tracks(img, moved, ExtractionConfig{});
        ASSERT_EQ(r.tracks.tracks[0].points.size(), ref.tracks.tracks[0].points.size());
        for (std::size_t i = 0; i < r.tracks.tracks[0].points.size(); ++i) {
            ASSERT_NEAR(r.tracks.tracks[0].points[i].delta, ref.tracks.tracks[0].points[i].delta, 1e-3);
        }
    }
}

TEST(ExtractionConfig, Defaults) {
    ExtractionConfig c;
    c.linewidth = 3.0;
    const auto r = c.resolved(Axis{"d", "GHz", 0, 0.5, 10});
    EXPECT_EQ(r.width_bounds.lo, 0.75);
    EXPECT_EQ(r.width_bounds.hi, 12.0);
    EXPECT_EQ(r.jump_threshold, 9.0);
    EXPECT_EQ(r.merge_distance, 3.0);
    EXPECT_EQ(r.sigma_floor, 5e-4);
    const nlohmann::json j = c;
    EXPECT_EQ(j.get<ExtractionConfig>().linewidth, 3.0);
}
