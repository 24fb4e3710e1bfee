#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "paircomp/select.hpp"

namespace paircomp {

/// A data-generating configuration: nu = B mu + sum coeff * c_triad, observed
/// m times per pair under N(0, sigma^2) noise.
struct Scenario {
    std::string name;
    int item_count = 6;
    std::vector<std::pair<Triad, double>> cyclic_terms;
    Eigen::VectorXd mu;      // defaults to zero when empty
    double sigma = 1.0;
    int m = 20;              // observations per pair
    std::uint64_t seed = 0;

    Eigen::VectorXd cyclic_profile(const BasisPair& bases) const;
    Eigen::VectorXd profile(const BasisPair& bases) const;
    std::vector<Triad> true_triads() const;
    int true_size() const { return static_cast<int>(cyclic_terms.size()); }
};

/// The three study scenarios at K = 6 (sigma = 1, mu = 0):
///   I   c_(0,1,2) - c_(0,3,4)              unique minimal model, all 3-tick
///   II  c_(0,3,4) - c_(1,4,5) + c_(2,3,5)  unique, plus an extra 3-tick triad
///   III c_(0,1,2) - c_(0,1,3)              non-unique minimal model, no 3-tick
Scenario study_scenario(const std::string& name, int m, std::uint64_t seed);

/// One replication's data: m draws per pair, deterministic per (seed, replication).
ComparisonData generate(const Scenario& scenario, const BasisPair& bases, int replication);

struct MethodSummary {
    long runs = 0;
    long failures = 0;
    double p_subset = 0.0;      // P(true triads all selected)
    double p_span = 0.0;        // P(true nu_cyclic in span of the selection)
    double mean_size_ratio = 0.0;
    double mse_selected = 0.0;  // E || nu_hat(selected model) - nu ||^2
};

struct StudyResult {
    Scenario scenario;
    int replications = 0;
    std::map<SelectionMethod, MethodSummary> methods;
    // model-class MSEs shared across methods
    double mse_true = 0.0;
    double mse_full = 0.0;
    double mse_reduced = 0.0;
    double runtime_seconds = 0.0;
};

struct StudyConfig {
    SelectionConfig selection{};
    int threads = 0;  // 0: hardware concurrency
};

/// Runs each method over `replications` independently generated data sets and
/// aggregates the selection metrics and the per-model-class MSEs. Replications
/// are seeded individually, so the result does not depend on the thread count.
/// A method failure inside a replication is counted, not fatal.
StudyResult run_study(const Scenario& scenario, const std::vector<SelectionMethod>& methods,
                      int replications, const StudyConfig& config = {});

}  // namespace paircomp
