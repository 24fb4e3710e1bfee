#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "paircomp/errors.hpp"

namespace paircomp {

/// Items are 0-based indices 0..K-1 throughout the in-process API.
/// File formats and reports use 1-based ids; the io layer converts.

struct Pair {
    int i = 0;
    int j = 0;  // i < j
    friend bool operator==(const Pair&, const Pair&) = default;
    friend auto operator<=>(const Pair&, const Pair&) = default;
};

struct Triad {
    int i = 0;
    int j = 0;
    int k = 0;  // i < j < k
    friend bool operator==(const Triad&, const Triad&) = default;
    friend auto operator<=>(const Triad&, const Triad&) = default;
};

/// Lexicographic enumeration of the K(K-1)/2 pairs (0,1),(0,2),...,(K-2,K-1)
/// with a closed-form inverse map from (i,j) to the row index.
class PairIndexMap {
public:
    explicit PairIndexMap(int item_count);

    int item_count() const { return k_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    const std::vector<Pair>& pairs() const { return pairs_; }
    Pair pair(int row) const { return pairs_.at(static_cast<std::size_t>(row)); }
    int row(int i, int j) const;  // requires 0 <= i < j < K

private:
    int k_;
    std::vector<Pair> pairs_;
};

/// Lexicographic enumeration of the K(K-1)(K-2)/6 triads (i,j,k), i<j<k.
class TriadIndexMap {
public:
    explicit TriadIndexMap(int item_count);

    int item_count() const { return k_; }
    int size() const { return static_cast<int>(triads_.size()); }
    const std::vector<Triad>& triads() const { return triads_; }
    Triad triad(int col) const { return triads_.at(static_cast<std::size_t>(col)); }
    int col(int i, int j, int k) const;  // requires 0 <= i < j < k < K

private:
    int k_;
    std::vector<Triad> triads_;
    std::vector<int> offset_ij_;  // flattened (i,j) -> column of (i,j,j+1)
};

/// The linear-space basis B (pairs x K, column b_k has +1 on rows (k,t) and
/// -1 on rows (s,k)) and the cyclic spanning set C (pairs x triads, column
/// (i,j,k) has +1 at (i,j), +1 at (j,k), -1 at (i,k)). Entries are -1/0/+1;
/// B^T C = 0 exactly.
struct BasisPair {
    int item_count = 0;
    PairIndexMap pair_map;
    TriadIndexMap triad_map;
    Eigen::MatrixXd linear_basis;   // B
    Eigen::MatrixXd cyclic_basis;   // C

    explicit BasisPair(int k);
};

/// build_bases(K) -> BasisPair. Throws config_error for K < 3.
BasisPair build_bases(int item_count);

/// A profile vector together with its orthogonal decomposition.
struct Profile {
    Eigen::VectorXd nu;
    Eigen::VectorXd nu_linear;
    Eigen::VectorXd nu_cyclic;
    Eigen::VectorXd mu;             // merits, sum-zero, nu_linear = B mu
    Eigen::VectorXd gamma_minnorm;  // minimum-norm gamma with C gamma = nu_cyclic
};

/// Orthogonal split of nu into its linear and cyclic components, with merits
/// from the uniform-weight projection and the minimum-norm cyclic coefficients.
Profile decompose(const Eigen::VectorXd& nu, const BasisPair& bases);

/// Merits under a general diagonal weighting: mu = (B^T diag(w) B)^+ B^T diag(w) nu.
/// Uniform weights reduce to the orthogonal projection used by decompose().
Eigen::VectorXd weighted_merits(const Eigen::VectorXd& nu, const Eigen::VectorXd& weights,
                                const BasisPair& bases);

/// Signed profile entry nu_ij for arbitrary orientation: nu_ji = -nu_ij.
double profile_entry(const Eigen::VectorXd& nu, const PairIndexMap& pm, int i, int j);

/// nu_ij + nu_jk + nu_ki for the triad (i,j,k). Zero iff nu is consistent
/// on the triad; equals the same expression evaluated on nu_cyclic.
double triad_residual(const Eigen::VectorXd& nu, const PairIndexMap& pm, const Triad& t);

/// Scale-aware zero tolerance: |x| <= 1e-9 * (1 + max|v|) counts as zero.
double zero_tolerance(const Eigen::VectorXd& v);

/// Pair x triad incidence of the nonzero entries of a cyclic profile.
/// tick(p, t) is true iff entry p of nu_cyclic is nonzero and pair p lies in
/// triad t; only the per-pair nonzero pattern is stored since a tick requires
/// pair-in-triad membership. Owns its index maps and is safe to keep around.
class TickTable {
public:
    TickTable(std::vector<bool> nonzero_pair, TriadIndexMap triad_map, PairIndexMap pair_map);

    bool tick(int pair_row, int triad_col) const;
    int tick_count(int triad_col) const { return tick_counts_.at(static_cast<std::size_t>(triad_col)); }
    const std::vector<int>& tick_counts() const { return tick_counts_; }
    /// Triad columns with exactly `count` ticks (count in 0..3), ascending.
    const std::vector<int>& class_of(int count) const;
    const std::vector<bool>& nonzero_pairs() const { return nonzero_pair_; }
    const TriadIndexMap& triad_map() const { return triad_map_; }

private:
    TriadIndexMap triad_map_;
    PairIndexMap pair_map_;
    std::vector<bool> nonzero_pair_;
    std::vector<int> tick_counts_;
    std::array<std::vector<int>, 4> classes_;
};

/// Tick-table of nu_cyclic at the given absolute tolerance (entries with
/// |value| <= tol count as zero).
TickTable tick_table(const Eigen::VectorXd& nu_cyclic, const BasisPair& bases, double tol);

/// All minimal models of nu_cyclic: the triad subsets of smallest size whose
/// span contains nu_cyclic. Exhaustive enumeration by size then lexicographic
/// order; refuses (analysis_refusal) if more than `subset_budget` candidate
/// subsets would have to be examined. nu_cyclic ~ 0 yields one empty model.
std::vector<std::vector<Triad>> minimal_models_oracle(const Eigen::VectorXd& nu_cyclic,
                                                      const BasisPair& bases,
                                                      int max_size,
                                                      std::uint64_t subset_budget = 5'000'000);

struct ModelSupportSpan {
    std::vector<Pair> support;     // all pairs covered by some triad, ascending
    Eigen::MatrixXd span_columns;  // the corresponding columns of C
};

ModelSupportSpan model_support_span(const std::vector<Triad>& triads, const BasisPair& bases);

/// Flow vector of the cycle i1 > i2 > ... > ir > i1 (r >= 3, distinct items):
/// +1 on forward edges, -1 against stored orientation. Lies in span(C);
/// for r = 3 coincides with the triad column (after orientation sign).
Eigen::VectorXd cycle_vector(const std::vector<int>& cycle, const BasisPair& bases);

}  // namespace paircomp
