#pragma once

#include <Eigen/Core>

namespace daxs::detail {

/// Parameter standard errors sqrt(diag(chi2_red * (J^T J)^+)) from a residual
/// Jacobian. Columns are normalised before the rank test; parameters touching
/// the numerical null space, or with a zero column, get infinity.
Eigen::VectorXd standard_errors(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r);

}  // namespace daxs::detail
