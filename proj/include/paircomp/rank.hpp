#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "paircomp/geometry.hpp"

namespace paircomp {

/// Per-triad transitivity grades, strongest first. `linear` means the triad
/// residual vanishes; `strong` and `weak` are the usual stochastic
/// transitivity conditions on the signs/magnitudes; `cyclic` is a strict
/// preference cycle.
enum class TransitivityGrade { linear, strong, weak, cyclic };

std::string to_string(TransitivityGrade g);

struct TriadTransitivity {
    Triad triad;
    TransitivityGrade grade = TransitivityGrade::linear;
};

struct TransitivityReport {
    std::vector<TriadTransitivity> per_triad;
    TransitivityGrade global = TransitivityGrade::linear;  // the weakest grade observed
};

/// Per-item rank sets: items ranked above (superior), below (inferior) and
/// equivalent to each item, judged from the signs of nu_ij at a scale-aware
/// zero tolerance.
struct RankSets {
    std::vector<std::vector<int>> superior;    // S_i = { j : nu_ij < 0 }
    std::vector<std::vector<int>> inferior;    // I_i = { j : nu_ij > 0 }
    std::vector<std::vector<int>> equivalent;  // E_i = { j : nu_ij = 0 }
};

/// mu*_i = sum_j nu_ij (row sums of the antisymmetric extension).
Eigen::VectorXd pseudo_merits(const Eigen::VectorXd& nu, const PairIndexMap& pm);

struct DominanceResult {
    Eigen::VectorXd scores;  // mu**_i = #{ j : nu_ij > 0 }, in 0..K-1
    Eigen::VectorXd ranks;   // 1 = best; ties broken recursively, leftovers averaged
};

/// Dominance scores with recursive tie-breaking: tied groups are re-scored
/// among themselves (recursion depth capped at K); unresolved ties receive
/// averaged ranks.
DominanceResult dominance_scores(const Eigen::VectorXd& nu, const PairIndexMap& pm);

RankSets rank_sets(const Eigen::VectorXd& nu, const PairIndexMap& pm);

TransitivityReport classify_transitivity(const Eigen::VectorXd& nu, const PairIndexMap& pm);

}  // namespace paircomp
