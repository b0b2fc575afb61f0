#pragma once

#include <span>
#include <vector>

namespace daxs {

struct WidthBounds {
    double lo = 0.5;
    double hi = 8.0;
};

enum class BaselineMode { fit, fixed };

struct ColumnFitOptions {
    WidthBounds width_bounds;
    /// Starting FWHM for every peak; clamped into width_bounds.
    double initial_width = 2.0;
    BaselineMode baseline = BaselineMode::fit;
    double fixed_baseline = 0.0;
    int max_iterations = 200;
};

/// One fitted Lorentzian: amplitude / (1 + (2 (delta - center) / width)^2).
struct PeakEstimate {
    double center = 0.0;
    double width = 0.0;
    double amplitude = 0.0;
    double center_sigma = 0.0;
    double width_sigma = 0.0;
    double amplitude_sigma = 0.0;
    bool converged = false;
    bool width_at_bound = false;
};

struct ColumnFit {
    std::vector<PeakEstimate> peaks;  // same order as the seeds
    double baseline = 0.0;
    double residual_rms = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Joint least-squares fit of one Lorentzian per seed plus a constant
/// baseline to samples (delta[i], intensity[i]). Standard errors come from the
/// Gauss-Newton covariance scaled by the residual variance. Non-convergence is
/// reported through the flags, never thrown.
///
/// Throws InputError for empty seeds, seeds outside [min delta, max delta],
/// mismatched spans, or width bounds not satisfying 0 < lo < hi.
ColumnFit fit_column_peaks(std::span<const double> delta, std::span<const double> intensity,
                           std::span<const double> seeds, const ColumnFitOptions& options);

}  // namespace daxs
