#include "paircomp/geometry.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "paircomp/linalg.hpp"

namespace paircomp {

namespace {

void check_item(int item, int k, const char* what) {
    if (item < 0 || item >= k) {
        throw config_error(std::string(what) + " index out of range");
    }
}

}  // namespace

PairIndexMap::PairIndexMap(int item_count) : k_(item_count) {
    if (k_ < 2) throw config_error("PairIndexMap requires at least 2 items");
    pairs_.reserve(static_cast<std::size_t>(k_) * (k_ - 1) / 2);
    for (int i = 0; i < k_; ++i) {
        for (int j = i + 1; j < k_; ++j) pairs_.push_back({i, j});
    }
}

int PairIndexMap::row(int i, int j) const {
    check_item(i, k_, "pair");
    check_item(j, k_, "pair");
    if (i >= j) throw config_error("pair row requires i < j");
    // rows (i,*) start after the i leading blocks of sizes K-1, K-2, ...
    return i * (2 * k_ - i - 1) / 2 + (j - i - 1);
}

TriadIndexMap::TriadIndexMap(int item_count) : k_(item_count) {
    if (k_ < 3) throw config_error("TriadIndexMap requires at least 3 items");
    triads_.reserve(static_cast<std::size_t>(k_) * (k_ - 1) * (k_ - 2) / 6);
    offset_ij_.assign(static_cast<std::size_t>(k_) * k_, -1);
    for (int i = 0; i < k_; ++i) {
        for (int j = i + 1; j < k_; ++j) {
            offset_ij_[static_cast<std::size_t>(i) * k_ + j] = static_cast<int>(triads_.size());
            for (int k = j + 1; k < k_; ++k) triads_.push_back({i, j, k});
        }
    }
}

int TriadIndexMap::col(int i, int j, int k) const {
    check_item(i, k_, "triad");
    check_item(j, k_, "triad");
    check_item(k, k_, "triad");
    if (!(i < j && j < k)) throw config_error("triad column requires i < j < k");
    return offset_ij_[static_cast<std::size_t>(i) * k_ + j] + (k - j - 1);
}

BasisPair::BasisPair(int k)
    : item_count(k), pair_map(k), triad_map(k) {
    const int p = pair_map.size();
    linear_basis = Eigen::MatrixXd::Zero(p, k);
    for (int row = 0; row < p; ++row) {
        const Pair pr = pair_map.pair(row);
        linear_basis(row, pr.i) = 1.0;   // b_k(s,t) = I(s=k) - I(t=k)
        linear_basis(row, pr.j) = -1.0;
    }
    cyclic_basis = Eigen::MatrixXd::Zero(p, triad_map.size());
    for (int col = 0; col < triad_map.size(); ++col) {
        const Triad t = triad_map.triad(col);
        cyclic_basis(pair_map.row(t.i, t.j), col) = 1.0;
        cyclic_basis(pair_map.row(t.j, t.k), col) = 1.0;
        cyclic_basis(pair_map.row(t.i, t.k), col) = -1.0;
    }
}

BasisPair build_bases(int item_count) {
    if (item_count < 3) throw config_error("build_bases requires K >= 3");
    return BasisPair(item_count);
}

double zero_tolerance(const Eigen::VectorXd& v) {
    const double scale = v.size() > 0 ? v.cwiseAbs().maxCoeff() : 0.0;
    return 1e-9 * (1.0 + scale);
}

Eigen::VectorXd weighted_merits(const Eigen::VectorXd& nu, const Eigen::VectorXd& weights,
                                const BasisPair& bases) {
    const auto& b = bases.linear_basis;
    if (nu.size() != b.rows() || weights.size() != b.rows()) {
        throw config_error("weighted_merits: dimension mismatch");
    }
    const Eigen::MatrixXd bw = b.transpose() * weights.asDiagonal();
    return linalg::pseudo_inverse(bw * b) * (bw * nu);
}

Profile decompose(const Eigen::VectorXd& nu, const BasisPair& bases) {
    const auto& b = bases.linear_basis;
    const auto& c = bases.cyclic_basis;
    if (nu.size() != b.rows()) throw config_error("decompose: profile length mismatch");

    Profile p;
    p.nu = nu;
    p.nu_linear = b * linalg::pseudo_inverse(b.transpose() * b) * (b.transpose() * nu);
    p.nu_cyclic = c * linalg::pseudo_inverse(c.transpose() * c) * (c.transpose() * nu);
    p.mu = weighted_merits(nu, Eigen::VectorXd::Ones(nu.size()), bases);
    p.gamma_minnorm = linalg::min_norm_solve(c, p.nu_cyclic);
    return p;
}

double profile_entry(const Eigen::VectorXd& nu, const PairIndexMap& pm, int i, int j) {
    if (i == j) throw config_error("profile_entry: i == j");
    return i < j ? nu(pm.row(i, j)) : -nu(pm.row(j, i));
}

double triad_residual(const Eigen::VectorXd& nu, const PairIndexMap& pm, const Triad& t) {
    if (!(t.i < t.j && t.j < t.k)) throw config_error("triad_residual: requires i < j < k");
    check_item(t.k, pm.item_count(), "triad");
    return nu(pm.row(t.i, t.j)) + nu(pm.row(t.j, t.k)) - nu(pm.row(t.i, t.k));
}

TickTable::TickTable(std::vector<bool> nonzero_pair, TriadIndexMap triad_map,
                     PairIndexMap pair_map)
    : triad_map_(std::move(triad_map)),
      pair_map_(std::move(pair_map)),
      nonzero_pair_(std::move(nonzero_pair)) {
    tick_counts_.resize(static_cast<std::size_t>(triad_map_.size()));
    for (int col = 0; col < triad_map_.size(); ++col) {
        const Triad t = triad_map_.triad(col);
        int n = 0;
        n += nonzero_pair_[static_cast<std::size_t>(pair_map_.row(t.i, t.j))];
        n += nonzero_pair_[static_cast<std::size_t>(pair_map_.row(t.j, t.k))];
        n += nonzero_pair_[static_cast<std::size_t>(pair_map_.row(t.i, t.k))];
        tick_counts_[static_cast<std::size_t>(col)] = n;
        classes_[static_cast<std::size_t>(n)].push_back(col);
    }
}

bool TickTable::tick(int pair_row, int triad_col) const {
    if (!nonzero_pair_.at(static_cast<std::size_t>(pair_row))) return false;
    const Pair p = pair_map_.pair(pair_row);
    const Triad t = triad_map_.triad(triad_col);
    const bool i_in = p.i == t.i || p.i == t.j || p.i == t.k;
    const bool j_in = p.j == t.i || p.j == t.j || p.j == t.k;
    return i_in && j_in;
}

const std::vector<int>& TickTable::class_of(int count) const {
    if (count < 0 || count > 3) throw config_error("tick class must be 0..3");
    return classes_[static_cast<std::size_t>(count)];
}

TickTable tick_table(const Eigen::VectorXd& nu_cyclic, const BasisPair& bases, double tol) {
    if (nu_cyclic.size() != bases.pair_map.size()) {
        throw config_error("tick_table: profile length mismatch");
    }
    if (tol < 0) throw config_error("tick_table: tolerance must be >= 0");
    std::vector<bool> nonzero(static_cast<std::size_t>(nu_cyclic.size()));
    for (Eigen::Index r = 0; r < nu_cyclic.size(); ++r) {
        nonzero[static_cast<std::size_t>(r)] = std::abs(nu_cyclic(r)) > tol;
    }
    return TickTable(std::move(nonzero), bases.triad_map, bases.pair_map);
}

std::vector<std::vector<Triad>> minimal_models_oracle(const Eigen::VectorXd& nu_cyclic,
                                                      const BasisPair& bases,
                                                      int max_size,
                                                      std::uint64_t subset_budget) {
    const auto& c = bases.cyclic_basis;
    if (nu_cyclic.size() != c.rows()) throw config_error("oracle: profile length mismatch");
    if (max_size < 0) throw config_error("oracle: max_size must be >= 0");

    const double norm = nu_cyclic.norm();
    if (norm <= zero_tolerance(nu_cyclic)) {
        return {std::vector<Triad>{}};  // the empty model, size 0
    }
    const double resid_tol = 1e-8 * norm;
    const int n_triads = bases.triad_map.size();

    // Total subsets that would be enumerated across all sizes up to max_size.
    std::uint64_t total = 0;
    for (int s = 1; s <= std::min(max_size, n_triads); ++s) {
        std::uint64_t binom = 1;
        for (int t = 0; t < s; ++t) {
            binom = binom * static_cast<std::uint64_t>(n_triads - t) / static_cast<std::uint64_t>(t + 1);
            if (binom > subset_budget) break;
        }
        total += binom;
        if (total > subset_budget) {
            throw analysis_refusal("minimal_models_oracle: enumeration budget exceeded");
        }
    }

    std::vector<std::vector<Triad>> found;
    std::vector<int> idx;
    Eigen::MatrixXd cols;
    for (int s = 1; s <= std::min(max_size, n_triads); ++s) {
        idx.assign(static_cast<std::size_t>(s), 0);
        for (int t = 0; t < s; ++t) idx[static_cast<std::size_t>(t)] = t;
        cols.resize(c.rows(), s);
        while (true) {
            for (int t = 0; t < s; ++t) cols.col(t) = c.col(idx[static_cast<std::size_t>(t)]);
            if (linalg::span_residual_sq(cols, nu_cyclic) <= resid_tol * resid_tol) {
                std::vector<Triad> model;
                model.reserve(static_cast<std::size_t>(s));
                for (int t : idx) model.push_back(bases.triad_map.triad(t));
                found.push_back(std::move(model));
            }
            // next lexicographic combination
            int pos = s - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n_triads - s + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int t = pos + 1; t < s; ++t) {
                idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
            }
        }
        if (!found.empty()) return found;  // smallest size reached
    }
    return found;  // empty: nothing of size <= max_size spans nu_cyclic
}

ModelSupportSpan model_support_span(const std::vector<Triad>& triads, const BasisPair& bases) {
    if (triads.empty()) throw config_error("model_support_span: empty triad set");
    std::set<Pair> support;
    Eigen::MatrixXd cols(bases.pair_map.size(), static_cast<Eigen::Index>(triads.size()));
    for (std::size_t t = 0; t < triads.size(); ++t) {
        const Triad& tr = triads[t];
        support.insert({tr.i, tr.j});
        support.insert({tr.j, tr.k});
        support.insert({tr.i, tr.k});
        cols.col(static_cast<Eigen::Index>(t)) = bases.cyclic_basis.col(bases.triad_map.col(tr.i, tr.j, tr.k));
    }
    return {std::vector<Pair>(support.begin(), support.end()), std::move(cols)};
}

Eigen::VectorXd cycle_vector(const std::vector<int>& cycle, const BasisPair& bases) {
    if (cycle.size() < 3) throw config_error("cycle_vector: cycle needs at least 3 items");
    std::set<int> seen;
    for (int item : cycle) {
        check_item(item, bases.item_count, "cycle");
        if (!seen.insert(item).second) throw config_error("cycle_vector: repeated item in cycle");
    }
    Eigen::VectorXd v = Eigen::VectorXd::Zero(bases.pair_map.size());
    for (std::size_t a = 0; a < cycle.size(); ++a) {
        const int i = cycle[a];
        const int j = cycle[(a + 1) % cycle.size()];
        if (i < j) {
            v(bases.pair_map.row(i, j)) += 1.0;
        } else {
            v(bases.pair_map.row(j, i)) -= 1.0;
        }
    }
    return v;
}

}  // namespace paircomp
