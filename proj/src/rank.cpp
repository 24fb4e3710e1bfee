#include "paircomp/rank.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

namespace paircomp {

std::string to_string(TransitivityGrade g) {
    switch (g) {
        case TransitivityGrade::linear: return "LST";
        case TransitivityGrade::strong: return "SST";
        case TransitivityGrade::weak: return "WST";
        case TransitivityGrade::cyclic: return "cyclic";
    }
    return "?";
}

Eigen::VectorXd pseudo_merits(const Eigen::VectorXd& nu, const PairIndexMap& pm) {
    const int k = pm.item_count();
    Eigen::VectorXd merits = Eigen::VectorXd::Zero(k);
    for (int row = 0; row < pm.size(); ++row) {
        const Pair p = pm.pair(row);
        merits(p.i) += nu(row);
        merits(p.j) -= nu(row);
    }
    return merits;
}

namespace {

int sign_at(double x, double tol) { return x > tol ? 1 : (x < -tol ? -1 : 0); }

/// Recursive dominance ranking of `items` (global positions offset..):
/// scores restricted to the group decide the order; tied subgroups recurse
/// until the depth cap or until no further split happens, then share the
/// average of the positions they occupy.
void rank_group(const Eigen::VectorXd& nu, const PairIndexMap& pm, double tol,
                const std::vector<int>& items, int offset, int depth, Eigen::VectorXd& ranks) {
    std::map<int, std::vector<int>, std::greater<>> by_score;
    for (int i : items) {
        int score = 0;
        for (int j : items) {
            if (j == i) continue;
            if (profile_entry(nu, pm, i, j) > tol) ++score;
        }
        by_score[score].push_back(i);
    }
    int pos = offset;
    for (auto& [score, group] : by_score) {
        if (group.size() == 1) {
            ranks(group.front()) = pos + 1;
        } else if (depth >= pm.item_count() || group.size() == items.size()) {
            const double avg = pos + (static_cast<double>(group.size()) + 1.0) / 2.0;
            for (int i : group) ranks(i) = avg;
        } else {
            rank_group(nu, pm, tol, group, pos, depth + 1, ranks);
        }
        pos += static_cast<int>(group.size());
    }
}

}  // namespace

DominanceResult dominance_scores(const Eigen::VectorXd& nu, const PairIndexMap& pm) {
    const int k = pm.item_count();
    const double tol = zero_tolerance(nu);
    DominanceResult out;
    out.scores = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (j != i && profile_entry(nu, pm, i, j) > tol) out.scores(i) += 1.0;
        }
    }
    out.ranks = Eigen::VectorXd::Zero(k);
    std::vector<int> all(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) all[static_cast<std::size_t>(i)] = i;
    rank_group(nu, pm, tol, all, 0, 0, out.ranks);
    return out;
}

RankSets rank_sets(const Eigen::VectorXd& nu, const PairIndexMap& pm) {
    const int k = pm.item_count();
    const double tol = zero_tolerance(nu);
    RankSets sets;
    sets.superior.resize(static_cast<std::size_t>(k));
    sets.inferior.resize(static_cast<std::size_t>(k));
    sets.equivalent.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            const int s = sign_at(profile_entry(nu, pm, i, j), tol);
            if (s < 0) {
                sets.superior[static_cast<std::size_t>(i)].push_back(j);
            } else if (s > 0) {
                sets.inferior[static_cast<std::size_t>(i)].push_back(j);
            } else {
                sets.equivalent[static_cast<std::size_t>(i)].push_back(j);
            }
        }
    }
    return sets;
}

namespace {

/// Grade one triad. Ties (entries within tolerance of zero) satisfy the weak
/// inequalities, so a triad with ties can still be SST/WST but never cyclic.
TransitivityGrade grade_triad(const Eigen::VectorXd& nu, const PairIndexMap& pm, const Triad& t,
                              double tol) {
    if (std::abs(triad_residual(nu, pm, t)) <= tol) return TransitivityGrade::linear;

    const double nu_ij = nu(pm.row(t.i, t.j));
    const double nu_jk = nu(pm.row(t.j, t.k));
    const double nu_ik = nu(pm.row(t.i, t.k));
    const int s_ij = sign_at(nu_ij, tol);
    const int s_jk = sign_at(nu_jk, tol);
    const int s_ik = sign_at(nu_ik, tol);

    // strict cycle: i>j>k>i or its reverse
    if ((s_ij > 0 && s_jk > 0 && s_ik < 0) || (s_ij < 0 && s_jk < 0 && s_ik > 0)) {
        return TransitivityGrade::cyclic;
    }

    // A non-cyclic triad admits at least one weakly consistent ordering
    // (a, b, c) with nu_ab, nu_bc, nu_ac >= 0 up to ties; grade strong if any
    // such ordering also satisfies the SST magnitude condition.
    const std::array<std::array<int, 3>, 6> perms = {{{t.i, t.j, t.k},
                                                      {t.i, t.k, t.j},
                                                      {t.j, t.i, t.k},
                                                      {t.j, t.k, t.i},
                                                      {t.k, t.i, t.j},
                                                      {t.k, t.j, t.i}}};
    for (const auto& [a, b, c] : perms) {
        const double ab = profile_entry(nu, pm, a, b);
        const double bc = profile_entry(nu, pm, b, c);
        const double ac = profile_entry(nu, pm, a, c);
        if (ab < -tol || bc < -tol || ac < -tol) continue;
        if (ac >= std::max(ab, bc) - tol) return TransitivityGrade::strong;
    }
    return TransitivityGrade::weak;
}

}  // namespace

TransitivityReport classify_transitivity(const Eigen::VectorXd& nu, const PairIndexMap& pm) {
    const double tol = zero_tolerance(nu);
    TransitivityReport rep;
    const int k = pm.item_count();
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            for (int l = j + 1; l < k; ++l) {
                const Triad t{i, j, l};
                const TransitivityGrade g = grade_triad(nu, pm, t, tol);
                rep.per_triad.push_back({t, g});
                if (static_cast<int>(g) > static_cast<int>(rep.global)) rep.global = g;
            }
        }
    }
    return rep;
}

}  // namespace paircomp
