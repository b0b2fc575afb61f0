#include "covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace daxs::detail {

Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r) {
    const Eigen::Index n = jac.rows();
    const Eigen::Index p = jac.cols();
    Eigen::VectorXd out = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
    if (n <= p) return out;
    const double chi2_red = r.squaredNorm() / static_cast<double>(n - p);

    const Eigen::VectorXd norms = jac.colwise().norm().transpose();
    std::vector<Eigen::Index> live;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (norms(j) > 0.0 && std::isfinite(norms(j))) live.push_back(j);
    }
    if (live.empty()) return out;
    const auto m = static_cast<Eigen::Index>(live.size());
    Eigen::MatrixXd jn(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto j = live[static_cast<std::size_t>(k)];
        jn.col(k) = jac.col(j) / norms(j);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jn.transpose() * jn);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::MatrixXd& vec = eig.eigenvectors();
    const double cutoff = 1e-12 * lam.maxCoeff();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
    std::vector<bool> unidentified(static_cast<std::size_t>(m), false);
    for (Eigen::Index k = 0; k < m; ++k) {
        if (lam(k) > cutoff) {
            cov += vec.col(k) * vec.col(k).transpose() / lam(k);
        } else {
            for (Eigen::Index i = 0; i < m; ++i) {
                if (std::fabs(vec(i, k)) > 1e-6) unidentified[static_cast<std::size_t>(i)] = true;
            }
        }
    }
    for (Eigen::Index k = 0; k < m; ++k) {
        if (unidentified[static_cast<std::size_t>(k)]) continue;
        const auto j = live[static_cast<std::size_t>(k)];
        out(j) = std::sqrt(std::max(cov(k, k) * chi2_red, 0.0)) / norms(j);
    }
    return out;
}

}  // namespace daxs::detail
