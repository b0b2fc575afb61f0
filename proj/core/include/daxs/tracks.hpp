#pragma once

// Seeded peak tracking: smooth an image along delta, fit bounded Lorentzians
// per column around operator-drawn seed curves, and thread the fitted centres
// into per-branch tracks.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daxs/image.hpp"
#include "daxs/model.hpp"
#include "daxs/peak_fit.hpp"

namespace daxs {

struct SeedPoint {
    double x = 0.0;
    double delta = 0.0;
};

struct SeedCurve {
    std::string track_id;
    std::optional<BranchLabel> branch;
    std::vector<SeedPoint> points;  // x strictly increasing, >= 2 points

    double x_min() const { return points.front().x; }
    double x_max() const { return points.back().x; }
    bool covers(double x) const { return x >= x_min() && x <= x_max(); }
    /// Linear interpolation between vertices; requires covers(x).
    double delta_at(double x) const;
};

struct SeedCurves {
    std::vector<SeedCurve> curves;
};

/// Throws InputError on duplicate ids, short curves or non-increasing x.
void validate(const SeedCurves& seeds);

struct TrackPoint {
    double x = 0.0;
    double delta = 0.0;
    double delta_sigma = 0.0;
    double amplitude = 0.0;
    double width = 0.0;
};

struct Track {
    std::string id;
    std::optional<BranchLabel> branch;
    std::vector<TrackPoint> points;  // ascending x, one per column
};

struct PeakTracks {
    std::vector<Track> tracks;

    const Track* find(const std::string& id) const;
    std::size_t total_points() const;
};

/// Why a seeded column produced no track point.
enum class RejectReason { merged, not_converged, width_at_bound, jumped, seed_off_axis };

std::string_view name(RejectReason r);

struct RejectedPoint {
    std::string track_id;
    double x = 0.0;
    RejectReason reason = RejectReason::merged;
};

struct ExtractionConfig {
    int sg_window = 11;  // 0 disables smoothing
    int sg_order = 2;
    /// Expected line FWHM; sets the defaults below when they are left at 0.
    double linewidth = 2.0;
    WidthBounds width_bounds{0.0, 0.0};  // default [linewidth/4, 4 linewidth]
    double jump_threshold = 0.0;         // default 3 linewidth
    double merge_distance = 0.0;         // default linewidth
    double window_margin = 0.0;          // default 3 linewidth
    /// Lower bound applied to reported centre uncertainties; default 1e-3 |delta step|.
    double sigma_floor = 0.0;
    BaselineMode baseline = BaselineMode::fit;

    /// Copy with every defaulted knob filled in from linewidth and the axis.
    ExtractionConfig resolved(const Axis& delta_axis) const;
};

struct ExtractionResult {
    PeakTracks tracks;
    std::vector<RejectedPoint> rejected;
    std::vector<std::string> warnings;
};

/// For every column and every seed curve covering it, fits the interpolated
/// seed positions jointly with their neighbours. Seeds closer than the merge
/// distance are fitted as one peak and all of them are rejected as merged, as
/// are distinct peaks whose fitted centres end up closer than that distance.
ExtractionResult extract_tracks(const SpectralImage& img, const SeedCurves& seeds,
                                const ExtractionConfig& cfg);

/// Attaches each seed curve's branch binding to the track with the same id.
void bind_tracks(PeakTracks& tracks, const SeedCurves& seeds);

// SeedCurves file: {"format":"daxs-seeds","version":1,"curves":[{"track_id",
// "branch":{sector,index,spin_z}|null,"points":[[x,delta],...]}]}
nlohmann::json seeds_to_json(const SeedCurves& seeds);
SeedCurves seeds_from_json(const nlohmann::json& j);
SeedCurves read_seeds(const std::string& path);
void write_seeds(const SeedCurves& seeds, const std::string& path);

// PeakTracks CSV: track_id,x,delta,delta_sigma,amplitude,width
void write_tracks_csv(const PeakTracks& tracks, std::ostream& out);
std::string tracks_to_csv(const PeakTracks& tracks);
PeakTracks read_tracks_csv(std::istream& in);

void to_json(nlohmann::json& j, const ExtractionConfig& c);
void from_json(const nlohmann::json& j, ExtractionConfig& c);

}  // namespace daxs
