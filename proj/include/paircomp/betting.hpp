#pragma once

#include <Eigen/Dense>

#include "paircomp/geometry.hpp"

namespace paircomp {

/// Win probability of item i against item j given nu_ij and outcome noise sd
/// sigma: P(W_ij) = 1 - Phi(nu_ij / sigma). Note the convention: a larger
/// nu_ij gives a *smaller* win probability; callers wanting the opposite
/// reading should negate nu_ij.
double win_probability(double nu_ij, double sigma);

/// Expected gain per unit stake when the adversary prices the event at omega
/// while its true probability is tau: (tau-omega)/omega when betting for,
/// (omega-tau)/(1-omega) when betting against, zero at equality.
/// Probabilities must lie strictly inside (0,1).
double expected_gain(double tau, double omega);

struct BettingReport {
    Eigen::VectorXd omega;  // per-pair win probability implied by the transitive profile
    Eigen::VectorXd tau;    // per-pair win probability under the selected profile
    Eigen::VectorXd win;    // per-pair expected gain, >= 0
    double total_win = 0.0;
};

/// Per-pair gains of betting with the selected profile against an adversary
/// pricing by the transitive one, and their sum over the round-robin.
BettingReport total_win(const Eigen::VectorXd& nu_transitive, const Eigen::VectorXd& nu_selected,
                        double sigma);

}  // namespace paircomp
