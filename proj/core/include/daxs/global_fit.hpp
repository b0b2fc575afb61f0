#pragma once

// Global least-squares fit of labeled Hamiltonian eigenvalue branches to peak
// tracks: delta = s * E_branch(eps; params) + delta_offset.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "daxs/hamiltonian.hpp"
#include "daxs/model.hpp"
#include "daxs/tracks.hpp"

namespace daxs {

/// Fit parameters: eight coupling magnitudes, four offsets, scale, offset.
enum class FitParam : std::uint8_t {
    t11, t12, t21, t22, t31, t32, t41, t42,
    l21, r21, r31, r41,
    scale, delta_offset
};

inline constexpr std::size_t kFitParamCount = 14;

std::string_view name(FitParam p);
std::optional<FitParam> fit_param_from_name(std::string_view s);
constexpr FitParam fit_param(Coupling c) { return static_cast<FitParam>(c); }

enum class Weighting { inverse_variance, uniform };

using FreeMask = std::array<bool, kFitParamCount>;

constexpr FreeMask make_all_free() {
    FreeMask a{};
    a.fill(true);
    return a;
}

struct FitConfig {
    ModelParams initial;
    double initial_scale = 1.0;
    double initial_delta_offset = 0.0;
    FreeMask free = make_all_free();
    SignClass sign_class = SignClass::all_positive;
    /// Ties |t42| to |t32|; t42's own free flag is then ignored.
    bool tie_t42_to_t32 = true;
    int max_iterations = 200;
    /// Relative change of the objective that counts as converged.
    double tolerance = 1e-10;
    Weighting weighting = Weighting::inverse_variance;

    bool is_free(FitParam p) const;
};

void validate(const FitConfig& cfg);

struct TrackResiduals {
    std::string track_id;
    std::vector<double> residuals;  // delta - model, GHz, in track point order
};

struct FitResult {
    ModelParams params;
    double scale = 1.0;
    double delta_offset = 0.0;
    /// sqrt(sum w r^2 / sum w), GHz; the minimized objective in RMS form.
    double residual_rms = 0.0;
    double initial_residual_rms = 0.0;
    /// Standard error per FitParam name; infinity when not identifiable, 0 when fixed.
    std::map<std::string, double> standard_errors;
    FreeMask free{};
    SignClass sign_class = SignClass::all_positive;
    bool tie_t42_to_t32 = true;
    int iterations = 0;
    bool converged = false;
    std::vector<TrackResiduals> track_residuals;

    double standard_error(FitParam p) const;
};

/// Parameter vector <-> model state plus weighted residuals and their
/// Jacobian. Eigenvalue derivatives are central differences with a 1e-4 GHz
/// step; scale and offset derivatives are analytic.
class GlobalObjective {
public:
    GlobalObjective(const PeakTracks& tracks, const FitConfig& cfg);

    struct State {
        ModelParams params;
        double scale = 1.0;
        double delta_offset = 0.0;
    };

    static constexpr double kEigenStep = 1e-4;

    const std::vector<FitParam>& free_params() const { return free_; }
    int num_params() const { return static_cast<int>(free_.size()); }
    int num_residuals() const { return static_cast<int>(points_.size()); }

    Eigen::VectorXd initial_point() const;
    Eigen::VectorXd lower_bounds() const;

    State unpack(const Eigen::VectorXd& x) const;

    Eigen::VectorXd residuals(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
    /// 0.5 * |r|^2
    double objective(const Eigen::VectorXd& x) const;
    /// J^T r
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
    /// sqrt(sum w r^2 / sum w)
    double weighted_rms(const Eigen::VectorXd& x) const;

    std::vector<TrackResiduals> track_residuals(const Eigen::VectorXd& x) const;

private:
    struct Point {
        std::size_t track = 0;
        std::size_t column = 0;  // index into xs_
        BranchLabel label;
        double delta = 0.0;
        double sqrt_weight = 1.0;
    };

    Eigen::VectorXd model(const State& s) const;
    Eigen::VectorXd model_energies(const ModelParams& p) const;

    FitConfig cfg_;
    std::vector<FitParam> free_;
    std::vector<std::string> track_ids_;
    std::vector<double> xs_;
    std::vector<Point> points_;
    double weight_sum_ = 0.0;
};

/// Throws InputError when no track is bound, two tracks share a branch, or a
/// binding names a branch the model does not have.
FitResult fit_hamiltonian(const PeakTracks& tracks, const FitConfig& cfg);

/// Model prediction s * E_label(eps) + delta_offset.
double predicted_delta(const FitResult& fit, const BranchLabel& label, double eps);

struct SignComparison {
    FitResult positive;
    FitResult mixed;
    /// 100 |m_a - m_b| / mean, for the reported couplings (t31, t41, t42 excluded).
    std::map<Coupling, double> percent_difference;
    /// |m_a - m_b| / 2 for every coupling.
    std::map<Coupling, double> systematic_sigma;
};

SignComparison compare_sign_classes(const PeakTracks& tracks, const FitConfig& cfg);

/// Couplings left out of sign-class percent reports.
bool excluded_from_sign_report(Coupling c);

struct ScanStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample (n - 1) standard deviation
};

/// Throws InputError for fewer than two results or differing free masks.
std::map<Coupling, ScanStats> estimate_scan_variability(std::span<const FitResult> results);

// FitResult file: ModelParams fields plus s, delta_offset, residual_rms,
// stderr (null = infinite), converged, iterations, sign_class.
nlohmann::json fit_result_to_json(const FitResult& r);
FitResult fit_result_from_json(const nlohmann::json& j);

nlohmann::json fit_config_to_json(const FitConfig& c);
FitConfig fit_config_from_json(const nlohmann::json& j);

std::string_view name(SignClass c);
SignClass sign_class_from_name(std::string_view s);

}  // namespace daxs
