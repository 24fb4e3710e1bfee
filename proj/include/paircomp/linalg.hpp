#pragma once

#include <Eigen/Dense>

namespace paircomp::linalg {

/// Relative singular-value cutoff used everywhere a numerical rank or a
/// pseudoinverse is needed: values below rcond * sigma_max are treated as zero.
inline constexpr double kDefaultRcond = 1e-10;

/// Moore-Penrose pseudoinverse via SVD with relative truncation.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rcond = kDefaultRcond);

/// Numerical rank by singular-value counting.
int svd_rank(const Eigen::MatrixXd& a, double rcond = kDefaultRcond);

/// Minimum-norm least-squares solution of A x = b.
Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               double rcond = kDefaultRcond);

/// Orthogonal projector onto the column space of A, i.e. A (A^T A)^+ A^T.
Eigen::MatrixXd column_space_projector(const Eigen::MatrixXd& a, double rcond = kDefaultRcond);

/// Squared norm of the residual of the least-squares projection of b onto
/// the column space of A. Zero (up to roundoff) iff b lies in the span.
double span_residual_sq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                        double rcond = kDefaultRcond);

}  // namespace paircomp::linalg
