#include "daxs/peak_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <ceres/ceres.h>

#include "daxs/model.hpp"

namespace daxs {

namespace {

/// Residuals model(delta_i) - y_i for a sum of Lorentzians plus optional
/// baseline. Parameter layout: [c0 w0 a0 c1 w1 a1 ... (b)].
class LorentzSumCost final : public ceres::CostFunction {
public:
    LorentzSumCost(std::span<const double> delta, std::span<const double> y, int peaks,
                   bool fit_baseline, double fixed_baseline)
        : delta_(delta), y_(y), peaks_(peaks), fit_baseline_(fit_baseline),
          fixed_baseline_(fixed_baseline) {
        set_num_residuals(static_cast<int>(y.size()));
        mutable_parameter_block_sizes()->push_back(num_params());
    }

    int num_params() const { return 3 * peaks_ + (fit_baseline_ ? 1 : 0); }

    bool Evaluate(double const* const* parameters, double* residuals,
                  double** jacobians) const override {
        const double* p = parameters[0];
        const int n = num_params();
        const double base = fit_baseline_ ? p[3 * peaks_] : fixed_baseline_;
        for (std::size_t i = 0; i < y_.size(); ++i) {
            double model = base;
            double* jrow = (jacobians && jacobians[0]) ? jacobians[0] + i * static_cast<std::size_t>(n) : nullptr;
            for (int k = 0; k < peaks_; ++k) {
                const double c = p[3 * k];
                const double w = p[3 * k + 1];
                const double a = p[3 * k + 2];
                const double u = 2.0 * (delta_[i] - c) / w;
                const double g = 1.0 / (1.0 + u * u);
                model += a * g;
                if (jrow) {
                    const double g2 = g * g;
                    jrow[3 * k] = 4.0 * a * u * g2 / w;
                    jrow[3 * k + 1] = 2.0 * a * u * u * g2 / w;
                    jrow[3 * k + 2] = g;
                }
            }
            if (jrow && fit_baseline_) jrow[3 * peaks_] = 1.0;
            residuals[i] = model - y_[i];
        }
        return true;
    }

private:
    std::span<const double> delta_;
    std::span<const double> y_;
    int peaks_;
    bool fit_baseline_;
    double fixed_baseline_;
};

}  // namespace

ColumnFit fit_column_peaks(std::span<const double> delta, std::span<const double> intensity,
                           std::span<const double> seeds, const ColumnFitOptions& options) {
    if (seeds.empty()) throw InputError("at least one peak seed is required");
    if (delta.size() != intensity.size() || delta.empty()) {
        throw InputError("delta and intensity must be non-empty and equally long");
    }
    const auto& wb = options.width_bounds;
    if (!(wb.lo > 0.0 && wb.lo < wb.hi)) throw InputError("width bounds must satisfy 0 < lo < hi");
    const auto [dmin_it, dmax_it] = std::minmax_element(delta.begin(), delta.end());
    const double dmin = *dmin_it;
    const double dmax = *dmax_it;
    for (double s : seeds) {
        if (!(s >= dmin && s <= dmax)) throw InputError("peak seed outside the delta axis");
    }

    const int peaks = static_cast<int>(seeds.size());
    const bool fit_baseline = options.baseline == BaselineMode::fit;
    auto* cost = new LorentzSumCost(delta, intensity, peaks, fit_baseline, options.fixed_baseline);
    const int np = cost->num_params();

    const double base0 = fit_baseline ? *std::min_element(intensity.begin(), intensity.end())
                                      : options.fixed_baseline;
    const double w0 = std::clamp(options.initial_width, wb.lo, wb.hi);
    std::vector<double> x(static_cast<std::size_t>(np));
    for (int k = 0; k < peaks; ++k) {
        const double s = seeds[static_cast<std::size_t>(k)];
        const auto nearest = std::min_element(delta.begin(), delta.end(), [s](double a, double b) {
            return std::fabs(a - s) < std::fabs(b - s);
        });
        const double height = intensity[static_cast<std::size_t>(nearest - delta.begin())] - base0;
        x[3 * k] = s;
        x[3 * k + 1] = w0;
        x[3 * k + 2] = std::max(height, 1e-6);
    }
    if (fit_baseline) x[static_cast<std::size_t>(3 * peaks)] = base0;

    ceres::Problem problem;
    problem.AddResidualBlock(cost, nullptr, x.data());
    for (int k = 0; k < peaks; ++k) {
        problem.SetParameterLowerBound(x.data(), 3 * k, dmin);
        problem.SetParameterUpperBound(x.data(), 3 * k, dmax);
        problem.SetParameterLowerBound(x.data(), 3 * k + 1, wb.lo);
        problem.SetParameterUpperBound(x.data(), 3 * k + 1, wb.hi);
        problem.SetParameterLowerBound(x.data(), 3 * k + 2, 0.0);
    }

    ceres::Solver::Options opts;
    opts.linear_solver_type = ceres::DENSE_QR;
    opts.max_num_iterations = options.max_iterations;
    opts.function_tolerance = 1e-12;
    opts.gradient_tolerance = 1e-14;
    opts.parameter_tolerance = 1e-12;
    opts.logging_type = ceres::SILENT;
    opts.num_threads = 1;
    ceres::Solver::Summary summary;
    ceres::Solve(opts, &problem, &summary);

    ColumnFit out;
    out.converged = summary.termination_type == ceres::CONVERGENCE;
    out.iterations = static_cast<int>(summary.iterations.size());
    out.baseline = fit_baseline ? x[static_cast<std::size_t>(3 * peaks)] : options.fixed_baseline;

    // Covariance from the Jacobian at the optimum.
    const auto n = static_cast<Eigen::Index>(intensity.size());
    Eigen::VectorXd r(n);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> jac(n, np);
    const double* params[] = {x.data()};
    double* jacs[] = {jac.data()};
    cost->Evaluate(params, r.data(), jacs);
    const double ssr = r.squaredNorm();
    out.residual_rms = std::sqrt(ssr / static_cast<double>(n));

    Eigen::VectorXd variances = Eigen::VectorXd::Constant(np, std::numeric_limits<double>::infinity());
    if (n > np) {
        const double sigma2 = ssr / static_cast<double>(n - np);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jtj);
        const double cutoff = eig.eigenvalues().maxCoeff() * 1e-14;
        if (eig.eigenvalues().minCoeff() > cutoff) {
            const Eigen::MatrixXd cov = jtj.inverse();
            variances = sigma2 * cov.diagonal();
        }
    }

    const double at_bound_tol = 1e-6 * (wb.hi - wb.lo);
    for (int k = 0; k < peaks; ++k) {
        PeakEstimate pe;
        pe.center = x[3 * k];
        pe.width = x[3 * k + 1];
        pe.amplitude = x[3 * k + 2];
        const auto sd = [&](int i) {
            const double v = variances(i);
            return std::isfinite(v) ? std::sqrt(std::max(v, 0.0)) : v;
        };
        pe.center_sigma = std::max(sd(3 * k), std::numeric_limits<double>::min());
        pe.width_sigma = sd(3 * k + 1);
        pe.amplitude_sigma = sd(3 * k + 2);
        pe.width_at_bound = pe.width - wb.lo <= at_bound_tol || wb.hi - pe.width <= at_bound_tol;
        pe.converged = out.converged;
        out.peaks.push_back(pe);
    }
    return out;
}

}  // namespace daxs
