#pragma once

// End-to-end compositions shared by the CLI, the service and the tests.

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daxs/global_fit.hpp"
#include "daxs/registration.hpp"
#include "daxs/tracks.hpp"

namespace daxs {

/// Fit config file: the FitConfig keys plus an optional "extraction" object.
struct PipelineConfig {
    ExtractionConfig extraction;
    FitConfig fit;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& c);

struct FitRun {
    ExtractionResult extraction;
    FitResult fit;
};

/// Smooth, extract, bind tracks to the seeds' branches and fit.
FitRun run_fit(const SpectralImage& img, const SeedCurves& seeds, const PipelineConfig& cfg);

struct SignCompareRun {
    ExtractionResult extraction;
    SignComparison comparison;
};

SignCompareRun run_sign_compare(const SpectralImage& img, const SeedCurves& seeds,
                                const PipelineConfig& cfg);

nlohmann::json sign_comparison_to_json(const SignComparison& c);

struct OverlayCurve {
    std::string track_id;
    BranchLabel branch;
    std::vector<SeedPoint> points;
};

/// Fitted branch curves sampled at every x of the axis, one per bound seed curve.
std::vector<OverlayCurve> fit_overlay(const FitResult& fit, const SeedCurves& seeds,
                                      const Axis& x_axis);

nlohmann::json overlay_to_json(std::span<const OverlayCurve> curves);

struct AlignAverageRun {
    AveragedImage average;
    std::vector<AlignmentEntry> report;
    std::vector<HyperbolaFit> hyperbolas;
};

/// Tracks the anticrossing's lower branch in every image with one seed curve,
/// fits a hyperbola, aligns the images on the vertex pixels and averages them.
AlignAverageRun run_align_average(std::span<const SpectralImage> images,
                                  std::span<const std::string> ids, const SeedCurve& anticrossing,
                                  const ExtractionConfig& cfg);

/// Alignment report entries, each with the image's hyperbola fit attached.
nlohmann::json align_report_to_json(const AlignAverageRun& run);

}  // namespace daxs
