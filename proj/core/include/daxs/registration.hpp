#pragma once

// Image registration on an anticrossing vertex, stack averaging with a
// validity mask, and dot/lead classification of reservoir-sweep lines.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "daxs/image.hpp"
#include "daxs/tracks.hpp"

namespace daxs {

/// delta(eps) = c + m (eps - eps0) - sqrt(a^2 (eps - eps0)^2 + t^2)
struct HyperbolaFit {
    double eps0 = 0.0;
    double c = 0.0;
    double m = 0.0;
    double a = 0.0;
    double t = 0.0;
    /// Standard errors in the order eps0, c, m, a, t; infinity when not identifiable.
    std::array<double, 5> standard_errors{};
    double residual_rms = 0.0;
    bool converged = false;

    double vertex_delta() const { return c - t; }
    double evaluate(double eps) const;
    /// Asymptote slopes for eps -> -inf and eps -> +inf.
    double left_slope() const { return m + a; }
    double right_slope() const { return m - a; }
    double t_stderr() const { return standard_errors[4]; }
};

/// Least-squares hyperbola fit to the lower branch of an anticrossing.
/// Needs >= 5 points with distinct x; collinear points throw InputError.
HyperbolaFit fit_anticrossing(std::span<const TrackPoint> points);

using PixelRef = std::array<long, 2>;  // (ix, iy)

/// Pixel of img nearest to the hyperbola vertex.
PixelRef vertex_pixel(const SpectralImage& img, const HyperbolaFit& fit);

struct AlignmentEntry {
    std::string image_id;
    PixelRef ref_pixel{};
    PixelRef shift{};  // output(p) = input(p - shift)
};

struct Alignment {
    std::vector<MaskedImage> images;
    std::vector<AlignmentEntry> report;
};

/// Integer-pixel translation of every image onto the first image's grid so
/// that all reference pixels land on refs[0]. Pixels with no source are masked.
/// Throws InputError on mismatched steps or counts, or refs/ids of wrong length.
Alignment align_images(std::span<const SpectralImage> images, std::span<const PixelRef> refs,
                       std::span<const std::string> ids = {});

struct AveragedImage {
    MaskedImage image;
    std::vector<int> counts;  // per pixel, row-major
};

/// Per-pixel mean over valid inputs. Throws InputError for fewer than two
/// inputs, differing grids, or when no pixel is valid in every input.
AveragedImage average_images(std::span<const MaskedImage> images);

enum class LineKind { dot, lead };

std::string_view name(LineKind k);

struct LineClass {
    std::string track_id;
    double slope = 0.0;  // d delta / dV, GHz per mV
    LineKind kind = LineKind::dot;
};

struct LineClassification {
    std::vector<LineClass> lines;
    std::vector<std::string> warnings;
};

/// Least-absolute-deviation slope of y against x.
double lad_slope(std::span<const double> x, std::span<const double> y);

/// |slope| < threshold -> dot, otherwise lead. Tracks with fewer than three
/// distinct x values are skipped with a warning.
LineClassification classify_lines(const PeakTracks& tracks, double slope_threshold);

nlohmann::json alignment_report_to_json(std::span<const AlignmentEntry> report);
nlohmann::json hyperbola_to_json(const HyperbolaFit& h);

}  // namespace daxs
