#include "daxs/pipeline.hpp"

#include "daxs/json_io.hpp"

namespace daxs {

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
    return json_io::guarded("fit config", [&] {
        PipelineConfig c;
        c.fit = fit_config_from_json(j);
        if (j.contains("extraction")) c.extraction = j.at("extraction").get<ExtractionConfig>();
        return c;
    });
}

nlohmann::json pipeline_config_to_json(const PipelineConfig& c) {
    nlohmann::json j = fit_config_to_json(c.fit);
    j["extraction"] = c.extraction;
    return j;
}

namespace {

ExtractionResult extract_bound(const SpectralImage& img, const SeedCurves& seeds,
                               const ExtractionConfig& cfg) {
    ExtractionResult ex = extract_tracks(img, seeds, cfg);
    bind_tracks(ex.tracks, seeds);
    return ex;
}

}  // namespace

FitRun run_fit(const SpectralImage& img, const SeedCurves& seeds, const PipelineConfig& cfg) {
    FitRun run;
    run.extraction = extract_bound(img, seeds, cfg.extraction);
    run.fit = fit_hamiltonian(run.extraction.tracks, cfg.fit);
    return run;
}

SignCompareRun run_sign_compare(const SpectralImage& img, const SeedCurves& seeds,
                                const PipelineConfig& cfg) {
    SignCompareRun run;
    run.extraction = extract_bound(img, seeds, cfg.extraction);
    run.comparison = compare_sign_classes(run.extraction.tracks, cfg.fit);
    return run;
}

nlohmann::json sign_comparison_to_json(const SignComparison& c) {
    nlohmann::json pct = nlohmann::json::object();
    for (const auto& [k, v] : c.percent_difference) pct[std::string(name(k))] = v;
    nlohmann::json sys = nlohmann::json::object();
    for (const auto& [k, v] : c.systematic_sigma) sys[std::string(name(k))] = v;
    return {{"positive", fit_result_to_json(c.positive)},
            {"mixed", fit_result_to_json(c.mixed)},
            {"percent_difference", pct},
            {"systematic_sigma", sys}};
}

std::vector<OverlayCurve> fit_overlay(const FitResult& fit, const SeedCurves& seeds,
                                      const Axis& x_axis) {
    std::vector<OverlayCurve> out;
    for (const auto& c : seeds.curves) {
        if (!c.branch) continue;
        OverlayCurve oc{c.track_id, *c.branch, {}};
        for (std::size_t i = 0; i < x_axis.count; ++i) {
            const double x = x_axis.at(i);
            oc.points.push_back({x, predicted_delta(fit, *c.branch, x)});
        }
        out.push_back(std::move(oc));
    }
    return out;
}

nlohmann::json overlay_to_json(std::span<const OverlayCurve> curves) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : curves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : c.points) pts.push_back({p.x, p.delta});
        arr.push_back({{"track_id", c.track_id}, {"branch", c.branch}, {"points", std::move(pts)}});
    }
    return {{"curves", std::move(arr)}};
}

AlignAverageRun run_align_average(std::span<const SpectralImage> images,
                                  std::span<const std::string> ids, const SeedCurve& anticrossing,
                                  const ExtractionConfig& cfg) {
    if (images.size() < 2) throw InputError("align-average needs at least two images");
    AlignAverageRun run;
    std::vector<PixelRef> refs;
    const SeedCurves seeds{{anticrossing}};
    validate(seeds);
    for (std::size_t k = 0; k < images.size(); ++k) {
        const ExtractionResult ex = extract_tracks(images[k], seeds, cfg);
        const Track* t = ex.tracks.find(anticrossing.track_id);
        const std::size_t n = t ? t->points.size() : 0;
        if (n < 5) {
            throw InputError("anticrossing track has " + std::to_string(n) + " points in image " +
                             std::to_string(k) + "; need at least 5");
        }
        run.hyperbolas.push_back(fit_anticrossing(t->points));
        refs.push_back(vertex_pixel(images[k], run.hyperbolas.back()));
    }
    Alignment al = align_images(images, refs, ids);
    run.average = average_images(al.images);
    run.report = std::move(al.report);
    return run;
}

nlohmann::json align_report_to_json(const AlignAverageRun& run) {
    nlohmann::json j = alignment_report_to_json(run.report);
    for (std::size_t k = 0; k < run.hyperbolas.size() && k < j.size(); ++k) {
        j[k]["hyperbola"] = hyperbola_to_json(run.hyperbolas[k]);
    }
    return j;
}

}  // namespace daxs
