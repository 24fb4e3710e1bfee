#pragma once

#include <vector>

#include <Eigen/Dense>

#include "paircomp/geometry.hpp"

namespace paircomp {

/// Per-pair samples of a complete paired-comparison graph together with the
/// pair-level sufficient statistics every estimator in this library reduces
/// to: counts n_ij, sums S_ij, means, the weighted graph Laplacian N and the
/// item sums S. Outcomes are stored for the orientation i < j; an outcome of
/// j against i enters as its negation.
class ComparisonData {
public:
    /// samples[row] holds the outcomes for pair_map.pair(row). Every pair
    /// needs at least one observation (completeness); throws data_error.
    ComparisonData(int item_count, std::vector<std::vector<double>> samples);

    int item_count() const { return k_; }
    const PairIndexMap& pair_map() const { return pair_map_; }
    const std::vector<std::vector<double>>& samples() const { return samples_; }

    int count(int row) const { return counts_(row) > 0 ? static_cast<int>(counts_(row)) : 0; }
    const Eigen::VectorXd& counts() const { return counts_; }          // diag of D
    const Eigen::VectorXd& pair_sums() const { return pair_sums_; }    // S_ij
    const Eigen::VectorXd& pair_means() const { return pair_means_; }  // S-bar_ij
    const Eigen::VectorXd& item_sums() const { return item_sums_; }    // S, length K
    const Eigen::MatrixXd& laplacian() const { return laplacian_; }    // N
    long total_count() const { return total_; }                        // n

    /// Xi-hat = D / n, the finite-sample pair-weight matrix (diagonal).
    Eigen::VectorXd xi_hat() const { return counts_ / static_cast<double>(total_); }

private:
    int k_;
    PairIndexMap pair_map_;
    std::vector<std::vector<double>> samples_;
    Eigen::VectorXd counts_;
    Eigen::VectorXd pair_sums_;
    Eigen::VectorXd pair_means_;
    Eigen::VectorXd item_sums_;
    Eigen::MatrixXd laplacian_;
    long total_ = 0;
};

/// A fitted model over span(B, C_s) for an ordered triad list s (empty list =
/// reduced, transitive model).
struct FittedModel {
    std::vector<Triad> triads;
    Eigen::VectorXd mu;        // length K, sum-zero
    Eigen::VectorXd gamma;     // one coefficient per triad
    Eigen::VectorXd nu;        // B mu + C_s gamma
    double sigma2 = 0.0;       // plug-in residual variance (full-model based)
    bool sigma2_degenerate = false;
    Eigen::MatrixXd covariance;  // plug-in asymptotic covariance of sqrt(n)(mu,gamma);
                                 // divide by n for finite-sample standard errors
    bool rank_deficient = false;
    int r() const { return static_cast<int>(triads.size()); }
};

struct Sigma2Estimate {
    double value = 0.0;
    bool degenerate = false;  // every pair observed once: estimate is vacuous
};

/// sigma2 = sum_ij sum_k (Y_ijk - mean_ij)^2 / n.
Sigma2Estimate sigma2_hat(const ComparisonData& data);

/// Degrees-of-freedom corrected variant, RSS / (n - C(K,2)): the unbiased
/// plug-in the tests and selection algorithms run on. Degenerate (value 0)
/// when every pair is observed exactly once.
Sigma2Estimate sigma2_hat_dof(const ComparisonData& data);

/// Reduced (transitive) model LSE: mu = N^+ S, no triads.
FittedModel fit_reduced(const ComparisonData& data, const BasisPair& bases);

/// Full-model LSE: the vector of pair means.
Eigen::VectorXd fit_full(const ComparisonData& data);

/// Joint minimum-norm LSE over span(B, C) using all triad columns; returns
/// (mu, gamma) with gamma spread over every triad. Reconstructs the pair
/// means exactly: B mu + C gamma = fit_full(data).
std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_joint_minnorm(const ComparisonData& data,
                                                              const BasisPair& bases);

/// Intermediate-model LSE for the given triads via the closed forms on the
/// pair-level statistics (the n-row design is never materialised):
///   gamma = (C_s^T D M C_s)^+ C_s^T D M S-bar,  M = I - B N^+ B^T D
///   mu    = N^+ (S - B^T D C_s gamma)
/// Duplicate triads throw; a rank-deficient C_s is fitted via pseudoinverse
/// and flagged.
FittedModel fit_intermediate(const ComparisonData& data, const BasisPair& bases,
                             const std::vector<Triad>& triads);

}  // namespace paircomp
