#include "paircomp/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/fisher_f.hpp>

#include "paircomp/linalg.hpp"

namespace paircomp {

std::string to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::fsts: return "fsts";
        case SelectionMethod::ftbs: return "ftbs";
        case SelectionMethod::fsr: return "fsr";
        case SelectionMethod::ftbs_fsr: return "ftbs-fsr";
        case SelectionMethod::ftbs_fsts: return "ftbs-fsts";
    }
    return "?";
}

SelectionMethod selection_method_from_string(const std::string& tag) {
    if (tag == "fsts") return SelectionMethod::fsts;
    if (tag == "ftbs") return SelectionMethod::ftbs;
    if (tag == "fsr") return SelectionMethod::fsr;
    if (tag == "ftbs-fsr") return SelectionMethod::ftbs_fsr;
    if (tag == "ftbs-fsts") return SelectionMethod::ftbs_fsts;
    throw config_error("unknown selection method: " + tag);
}

namespace {

constexpr double kDependenceTol = 1e-10;

std::vector<int> all_triad_cols(const BasisPair& bases) {
    std::vector<int> cols(static_cast<std::size_t>(bases.triad_map.size()));
    std::iota(cols.begin(), cols.end(), 0);
    return cols;
}

bool dependent_on(const Eigen::MatrixXd& span_cols, const Eigen::VectorXd& col) {
    if (span_cols.cols() == 0) return col.norm() <= kDependenceTol;
    return linalg::span_residual_sq(span_cols, col) <=
           kDependenceTol * kDependenceTol * col.squaredNorm();
}

Eigen::MatrixXd append_column(const Eigen::MatrixXd& m, const Eigen::VectorXd& col) {
    Eigen::MatrixXd out(m.rows(), m.cols() + 1);
    if (m.cols() > 0) out.leftCols(m.cols()) = m;
    out.col(m.cols()) = col;
    return out;
}

/// Tests a nested path of models by lack of fit, stopping at the first
/// acceptance. `path` holds strictly growing triad lists starting from the
/// linear model. Saturated stages interpolate the data and are accepted
/// without a test.
SelectionResult walk_nested_path(const ComparisonData& data, const BasisPair& bases,
                                 const std::vector<std::vector<Triad>>& path, double alpha_lof,
                                 const LackOfFitConfig& lof) {
    SelectionResult result;
    const int p = bases.pair_map.size();
    for (const auto& candidate : path) {
        FittedModel fit = fit_intermediate(data, bases, candidate);
        const int t = p - (bases.item_count + static_cast<int>(candidate.size()) - 1);
        TraceEntry entry;
        entry.candidate = candidate;
        if (t <= 0) {
            entry.p_value = 1.0;
            entry.decision = StepDecision::saturated_accept;
        } else {
            entry.p_value = lack_of_fit(data, bases, fit, lof).p_value;
            entry.decision =
                entry.p_value >= alpha_lof ? StepDecision::accepted : StepDecision::rejected;
        }
        result.trace.push_back(entry);
        result.triads = candidate;
        result.fitted = std::move(fit);
        if (entry.decision != StepDecision::rejected) {
            result.accepted = true;
            return result;
        }
    }
    result.accepted = false;  // exhausted: the returned model is the deepest candidate
    return result;
}

struct RankedTriad {
    int col;
    double p;
    double abs_stat;
};

/// Triad-test ranking over a candidate pool: p ascending, |T| descending,
/// lexicographic column order last. With a degenerate variance estimate the
/// p-value collapses to 0/1 on the exact residual.
std::vector<RankedTriad> rank_triads(const ComparisonData& data, const BasisPair& bases,
                                     const std::vector<int>& pool) {
    const double sigma2 = sigma2_hat_dof(data).value;
    const double resid_tol = 3.0 * zero_tolerance(data.pair_means());
    std::vector<RankedTriad> ranked;
    ranked.reserve(pool.size());
    for (int col : pool) {
        const Triad tr = bases.triad_map.triad(col);
        RankedTriad rt;
        rt.col = col;
        if (sigma2 > 0.0) {
            const TestOutcome out = triad_test(data, tr, sigma2);
            rt.p = out.p_value;
            rt.abs_stat = std::abs(out.statistic);
        } else {
            const double resid = triad_residual(data.pair_means(), bases.pair_map, tr);
            rt.abs_stat = std::abs(resid);
            rt.p = std::abs(resid) > resid_tol ? 0.0 : 1.0;
        }
        ranked.push_back(rt);
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedTriad& a, const RankedTriad& b) {
        if (a.p != b.p) return a.p < b.p;
        if (a.abs_stat != b.abs_stat) return a.abs_stat > b.abs_stat;
        return a.col < b.col;
    });
    return ranked;
}

SelectionResult fsts_core(const ComparisonData& data, const BasisPair& bases, double alpha_triads,
                          double alpha_lof, const LackOfFitConfig& lof,
                          const std::vector<int>& pool) {
    if (alpha_triads <= 0.0 || alpha_triads >= 1.0 || alpha_lof <= 0.0 || alpha_lof >= 1.0) {
        throw config_error("fsts: alpha levels must be in (0,1)");
    }
    const std::vector<RankedTriad> ranked = rank_triads(data, bases, pool);
    const int max_r = (bases.item_count - 1) * (bases.item_count - 2) / 2 - 1;

    std::vector<std::vector<Triad>> path;
    path.emplace_back();  // the linear model
    std::vector<Triad> current;
    Eigen::MatrixXd span(bases.pair_map.size(), 0);
    for (const RankedTriad& rt : ranked) {
        if (static_cast<int>(current.size()) >= max_r) break;  // next test would saturate
        const Eigen::VectorXd col = bases.cyclic_basis.col(rt.col);
        if (dependent_on(span, col)) continue;  // adds nothing to the span
        span = append_column(span, col);
        current.push_back(bases.triad_map.triad(rt.col));
        path.push_back(current);
    }

    SelectionResult result = walk_nested_path(data, bases, path, alpha_lof, lof);
    result.method = SelectionMethod::fsts;
    result.config.alpha_triads = alpha_triads;
    result.config.alpha_lof = alpha_lof;
    result.config.lof = lof;
    return result;
}

/// Greedy lexicographic extraction of columns independent of an existing span.
/// Appends the kept columns to `span` and their triads to `kept`.
void extend_independent(const BasisPair& bases, const std::vector<int>& candidate_cols,
                        Eigen::MatrixXd& span, std::vector<Triad>& kept) {
    for (int col : candidate_cols) {
        const Eigen::VectorXd c = bases.cyclic_basis.col(col);
        if (dependent_on(span, c)) continue;
        span = append_column(span, c);
        kept.push_back(bases.triad_map.triad(col));
    }
}

SelectionResult ftbs_core(const ComparisonData& data, const BasisPair& bases,
                          double alpha_components, Correction correction, double alpha_lof,
                          const LackOfFitConfig& lof) {
    if (alpha_components <= 0.0 || alpha_components >= 1.0 || alpha_lof <= 0.0 ||
        alpha_lof >= 1.0) {
        throw config_error("ftbs: alpha levels must be in (0,1)");
    }
    ComponentTestReport comp = component_tests(data, bases, alpha_components, correction);
    const Eigen::VectorXd nu_star = comp.thresholded();
    TickTable table = tick_table(nu_star, bases, zero_tolerance(nu_star));

    // nested stages: 3-tick block, then independent 2-tick additions, then 1-tick
    Eigen::MatrixXd span(bases.pair_map.size(), 0);
    std::vector<Triad> stage2, stage3, stage4;
    extend_independent(bases, table.class_of(3), span, stage2);
    stage3 = stage2;
    extend_independent(bases, table.class_of(2), span, stage3);
    stage4 = stage3;
    extend_independent(bases, table.class_of(1), span, stage4);

    std::vector<std::vector<Triad>> path;
    path.emplace_back();
    for (const auto& stage : {stage2, stage3, stage4}) {
        if (stage.size() > path.back().size()) path.push_back(stage);
    }

    SelectionResult result = walk_nested_path(data, bases, path, alpha_lof, lof);
    result.method = SelectionMethod::ftbs;
    result.config.alpha_components = alpha_components;
    result.config.alpha_lof = alpha_lof;
    result.config.correction = correction;
    result.config.lof = lof;
    result.tick_table_used = std::move(table);
    result.component_report = std::move(comp);
    return result;
}

SelectionResult fsr_core(const ComparisonData& data, const BasisPair& bases, double alpha,
                         const std::vector<int>& pool) {
    if (alpha <= 0.0 || alpha >= 1.0) throw config_error("fsr: alpha must be in (0,1)");
    const int p = bases.pair_map.size();
    const int k = bases.item_count;
    const Eigen::VectorXd sq = data.counts().cwiseSqrt();

    // orthonormal basis of the weighted linear design D^{1/2} B
    const Eigen::MatrixXd btil = sq.asDiagonal() * bases.linear_basis;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(btil);
    qr.setThreshold(kDependenceTol);
    const int base_rank = static_cast<int>(qr.rank());
    const Eigen::MatrixXd q_base =
        Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(p, base_rank));

    Eigen::VectorXd resid = sq.cwiseProduct(data.pair_means());
    resid -= q_base * (q_base.transpose() * resid);

    const double ss_within = sigma2_hat(data).value * static_cast<double>(data.total_count());
    double rss = ss_within + resid.squaredNorm();
    const double rss_floor = 1e-12 * (1.0 + sq.cwiseProduct(data.pair_means()).squaredNorm());

    SelectionResult result;
    result.method = SelectionMethod::fsr;
    result.config.alpha_fsr = alpha;

    Eigen::MatrixXd q_extra(p, 0);
    std::vector<Triad> selected;
    std::vector<bool> used(static_cast<std::size_t>(bases.triad_map.size()), false);
    const int max_r = (k - 1) * (k - 2) / 2;

    while (static_cast<int>(selected.size()) < max_r) {
        const long dof = data.total_count() - base_rank - (static_cast<long>(selected.size()) + 1);
        if (dof < 1) break;

        double best_red = 0.0;
        int best_col = -1;
        Eigen::VectorXd best_dir;
        for (int col : pool) {
            if (used[static_cast<std::size_t>(col)]) continue;
            Eigen::VectorXd w = sq.cwiseProduct(Eigen::VectorXd(bases.cyclic_basis.col(col)));
            w -= q_base * (q_base.transpose() * w);
            if (q_extra.cols() > 0) w -= q_extra * (q_extra.transpose() * w);
            const double norm = w.norm();
            if (norm <= kDependenceTol * std::sqrt(3.0 * data.counts().maxCoeff())) continue;
            w /= norm;
            const double proj = w.dot(resid);
            const double red = proj * proj;
            if (red > best_red) {
                best_red = red;
                best_col = col;
                best_dir = w;
            }
        }
        if (best_col < 0 || best_red <= 0.0) break;

        const double rss_new = std::max(rss - best_red, 0.0);
        double p_value;
        if (rss_new <= rss_floor) {
            p_value = 0.0;  // perfect fit: the added column absorbs all residual variance
        } else {
            const double f_stat = best_red / (rss_new / static_cast<double>(dof));
            p_value = boost::math::cdf(
                boost::math::complement(boost::math::fisher_f(1.0, static_cast<double>(dof)), f_stat));
        }

        TraceEntry entry;
        entry.candidate = selected;
        entry.candidate.push_back(bases.triad_map.triad(best_col));
        entry.p_value = p_value;
        entry.decision = p_value < alpha ? StepDecision::accepted : StepDecision::rejected;
        result.trace.push_back(entry);
        if (p_value >= alpha) break;

        selected.push_back(bases.triad_map.triad(best_col));
        used[static_cast<std::size_t>(best_col)] = true;
        q_extra = append_column(q_extra, best_dir);
        resid -= best_dir * best_dir.dot(resid);
        rss = rss_new;
    }

    result.triads = selected;
    result.fitted = fit_intermediate(data, bases, selected);
    result.accepted = true;  // FSR always terminates with a model (possibly empty)
    return result;
}

}  // namespace

SelectionResult fsts(const ComparisonData& data, const BasisPair& bases, double alpha_triads,
                     double alpha_lof, const LackOfFitConfig& lof) {
    return fsts_core(data, bases, alpha_triads, alpha_lof, lof, all_triad_cols(bases));
}

SelectionResult ftbs(const ComparisonData& data, const BasisPair& bases, double alpha_components,
                     Correction correction, double alpha_lof, const LackOfFitConfig& lof) {
    return ftbs_core(data, bases, alpha_components, correction, alpha_lof, lof);
}

SelectionResult fsr(const ComparisonData& data, const BasisPair& bases, double alpha) {
    return fsr_core(data, bases, alpha, all_triad_cols(bases));
}

SelectionResult ftbs_screened(const ComparisonData& data, const BasisPair& bases,
                              SelectionMethod inner, const SelectionConfig& config) {
    if (inner != SelectionMethod::fsr && inner != SelectionMethod::fsts) {
        throw config_error("ftbs_screened: inner method must be fsr or fsts");
    }
    ComponentTestReport comp =
        component_tests(data, bases, config.alpha_components, config.correction);
    const Eigen::VectorXd nu_star = comp.thresholded();
    TickTable table = tick_table(nu_star, bases, zero_tolerance(nu_star));

    std::vector<int> pool;
    for (int col = 0; col < bases.triad_map.size(); ++col) {
        if (table.tick_count(col) >= 1) pool.push_back(col);
    }

    SelectionResult result;
    if (pool.empty()) {
        result.triads.clear();
        result.fitted = fit_intermediate(data, bases, {});
        const TestOutcome out = lack_of_fit(data, bases, result.fitted, config.lof);
        TraceEntry entry{{}, out.p_value,
                         out.p_value >= config.alpha_lof ? StepDecision::accepted
                                                         : StepDecision::rejected};
        result.accepted = entry.decision == StepDecision::accepted;
        result.trace.push_back(std::move(entry));
    } else if (inner == SelectionMethod::fsr) {
        result = fsr_core(data, bases, config.alpha_fsr, pool);
    } else {
        result = fsts_core(data, bases, config.alpha_triads, config.alpha_lof, config.lof, pool);
    }
    result.method = inner == SelectionMethod::fsr ? SelectionMethod::ftbs_fsr
                                                  : SelectionMethod::ftbs_fsts;
    result.config = config;
    result.tick_table_used = std::move(table);
    result.component_report = std::move(comp);
    return result;
}

SelectionResult run_selection(const ComparisonData& data, const BasisPair& bases,
                              SelectionMethod method, const SelectionConfig& config) {
    switch (method) {
        case SelectionMethod::fsts:
            return fsts(data, bases, config.alpha_triads, config.alpha_lof, config.lof);
        case SelectionMethod::ftbs:
            return ftbs(data, bases, config.alpha_components, config.correction, config.alpha_lof,
                        config.lof);
        case SelectionMethod::fsr:
            return fsr(data, bases, config.alpha_fsr);
        case SelectionMethod::ftbs_fsr:
            return ftbs_screened(data, bases, SelectionMethod::fsr, config);
        case SelectionMethod::ftbs_fsts:
            return ftbs_screened(data, bases, SelectionMethod::fsts, config);
    }
    throw config_error("run_selection: unknown method");
}

}  // namespace paircomp
