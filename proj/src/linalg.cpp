#include "paircomp/linalg.hpp"

namespace paircomp::linalg {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& a, double rcond) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? rcond * sv(0) : 0.0;
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

int svd_rank(const Eigen::MatrixXd& a, double rcond) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = rcond * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rcond) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    return svd.solve(b);
}

Eigen::MatrixXd column_space_projector(const Eigen::MatrixXd& a, double rcond) {
    return a * pseudo_inverse(a.transpose() * a, rcond) * a.transpose();
}

double span_residual_sq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double rcond) {
    const Eigen::VectorXd x = min_norm_solve(a, b, rcond);
    return (a * x - b).squaredNorm();
}

}  // namespace paircomp::linalg
