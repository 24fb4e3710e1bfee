#include "paircomp/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "paircomp/linalg.hpp"

namespace paircomp {

ComparisonData::ComparisonData(int item_count, std::vector<std::vector<double>> samples)
    : k_(item_count), pair_map_(item_count), samples_(std::move(samples)) {
    if (k_ < 3) throw data_error("ComparisonData requires at least 3 items");
    const int p = pair_map_.size();
    if (static_cast<int>(samples_.size()) != p) {
        throw data_error("ComparisonData: expected one sample list per pair");
    }
    counts_.resize(p);
    pair_sums_.resize(p);
    pair_means_.resize(p);
    for (int row = 0; row < p; ++row) {
        const auto& ys = samples_[static_cast<std::size_t>(row)];
        if (ys.empty()) {
            const Pair pr = pair_map_.pair(row);
            throw data_error("incomplete comparison graph: no observations for pair (" +
                             std::to_string(pr.i) + "," + std::to_string(pr.j) + ")");
        }
        double sum = 0.0;
        for (double y : ys) sum += y;
        counts_(row) = static_cast<double>(ys.size());
        pair_sums_(row) = sum;
        pair_means_(row) = sum / static_cast<double>(ys.size());
        total_ += static_cast<long>(ys.size());
    }
    laplacian_ = Eigen::MatrixXd::Zero(k_, k_);
    item_sums_ = Eigen::VectorXd::Zero(k_);
    for (int row = 0; row < p; ++row) {
        const Pair pr = pair_map_.pair(row);
        const double n_ij = counts_(row);
        laplacian_(pr.i, pr.i) += n_ij;
        laplacian_(pr.j, pr.j) += n_ij;
        laplacian_(pr.i, pr.j) -= n_ij;
        laplacian_(pr.j, pr.i) -= n_ij;
        item_sums_(pr.i) += pair_sums_(row);
        item_sums_(pr.j) -= pair_sums_(row);
    }
}

namespace {

double residual_ss(const ComparisonData& data, bool& any_replicated) {
    double ss = 0.0;
    any_replicated = false;
    const auto& means = data.pair_means();
    for (int row = 0; row < data.pair_map().size(); ++row) {
        const auto& ys = data.samples()[static_cast<std::size_t>(row)];
        if (ys.size() > 1) any_replicated = true;
        for (double y : ys) {
            const double d = y - means(row);
            ss += d * d;
        }
    }
    return ss;
}

}  // namespace

Sigma2Estimate sigma2_hat(const ComparisonData& data) {
    bool any_replicated = false;
    const double ss = residual_ss(data, any_replicated);
    return {ss / static_cast<double>(data.total_count()), !any_replicated};
}

Sigma2Estimate sigma2_hat_dof(const ComparisonData& data) {
    bool any_replicated = false;
    const double ss = residual_ss(data, any_replicated);
    const long dof = data.total_count() - data.pair_map().size();
    if (dof <= 0) return {0.0, true};
    return {ss / static_cast<double>(dof), !any_replicated};
}

Eigen::VectorXd fit_full(const ComparisonData& data) { return data.pair_means(); }

namespace {

void attach_sigma_and_cov(FittedModel& model, const ComparisonData& data,
                          const Eigen::MatrixXd& design) {
    const Sigma2Estimate s2 = sigma2_hat_dof(data);
    model.sigma2 = s2.value;
    model.sigma2_degenerate = s2.degenerate;
    const Eigen::VectorXd xi = data.xi_hat();
    const Eigen::MatrixXd gram = design.transpose() * xi.asDiagonal() * design;
    model.covariance = s2.value * linalg::pseudo_inverse(gram);
}

}  // namespace

FittedModel fit_reduced(const ComparisonData& data, const BasisPair& bases) {
    if (bases.item_count != data.item_count()) throw config_error("fit_reduced: K mismatch");
    FittedModel model;
    model.mu = linalg::pseudo_inverse(data.laplacian()) * data.item_sums();
    model.gamma.resize(0);
    model.nu = bases.linear_basis * model.mu;
    attach_sigma_and_cov(model, data, bases.linear_basis);
    return model;
}

namespace {

/// gamma and mu via the closed forms on pair-level statistics; `cols` is the
/// (possibly empty) cyclic design C_s.
FittedModel fit_via_closed_forms(const ComparisonData& data, const BasisPair& bases,
                                 const Eigen::MatrixXd& cols, std::vector<Triad> triads) {
    const auto& b = bases.linear_basis;
    const Eigen::VectorXd& d = data.counts();
    const Eigen::VectorXd& sbar = data.pair_means();
    const Eigen::MatrixXd n_pinv = linalg::pseudo_inverse(data.laplacian());

    FittedModel model;
    model.triads = std::move(triads);
    if (cols.cols() == 0) {
        model.mu = n_pinv * data.item_sums();
        model.gamma.resize(0);
        model.nu = b * model.mu;
    } else {
        // residualise the cyclic columns against span(B) in the D-metric
        const Eigen::MatrixXd proj_b = b * n_pinv * b.transpose() * d.asDiagonal();
        const Eigen::MatrixXd resid_cols = cols - proj_b * cols;
        const Eigen::MatrixXd gram = cols.transpose() * d.asDiagonal() * resid_cols;
        const Eigen::VectorXd rhs = cols.transpose() * d.asDiagonal() * (sbar - proj_b * sbar);
        model.gamma = linalg::pseudo_inverse(gram) * rhs;
        model.mu = n_pinv * (data.item_sums() - b.transpose() * d.asDiagonal() * cols * model.gamma);
        model.nu = b * model.mu + cols * model.gamma;
    }

    Eigen::MatrixXd design(b.rows(), b.cols() + cols.cols());
    design << b, cols;
    attach_sigma_and_cov(model, data, design);
    return model;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_joint_minnorm(const ComparisonData& data,
                                                              const BasisPair& bases) {
    if (bases.item_count != data.item_count()) throw config_error("fit_joint_minnorm: K mismatch");
    const FittedModel m =
        fit_via_closed_forms(data, bases, bases.cyclic_basis, bases.triad_map.triads());
    return {m.mu, m.gamma};
}

FittedModel fit_intermediate(const ComparisonData& data, const BasisPair& bases,
                             const std::vector<Triad>& triads) {
    if (bases.item_count != data.item_count()) throw config_error("fit_intermediate: K mismatch");
    std::set<Triad> unique(triads.begin(), triads.end());
    if (unique.size() != triads.size()) throw config_error("fit_intermediate: duplicate triads");

    Eigen::MatrixXd cols(bases.pair_map.size(), static_cast<Eigen::Index>(triads.size()));
    for (std::size_t t = 0; t < triads.size(); ++t) {
        const Triad& tr = triads[t];
        cols.col(static_cast<Eigen::Index>(t)) =
            bases.cyclic_basis.col(bases.triad_map.col(tr.i, tr.j, tr.k));
    }
    FittedModel model = fit_via_closed_forms(data, bases, cols, triads);
    if (!triads.empty() && linalg::svd_rank(cols) < static_cast<int>(triads.size())) {
        model.rank_deficient = true;
    }
    return model;
}

}  // namespace paircomp
