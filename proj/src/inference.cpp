#include "paircomp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "paircomp/linalg.hpp"
#include "paircomp/rng.hpp"

namespace paircomp {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Eigen::VectorXd ComponentTestReport::thresholded() const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nu_cyclic_hat.size());
    for (Eigen::Index r = 0; r < nu_cyclic_hat.size(); ++r) {
        if (decisions[static_cast<std::size_t>(r)] == ComponentDecision::rejected) {
            out(r) = nu_cyclic_hat(r);
        }
    }
    return out;
}

TestOutcome triad_test(const ComparisonData& data, const Triad& triad, double sigma2) {
    if (sigma2 <= 0.0) throw config_error("triad_test: sigma2 must be positive");
    const PairIndexMap& pm = data.pair_map();
    const double resid = triad_residual(data.pair_means(), pm, triad);
    const double scale = std::sqrt(1.0 / data.counts()(pm.row(triad.i, triad.j)) +
                                   1.0 / data.counts()(pm.row(triad.j, triad.k)) +
                                   1.0 / data.counts()(pm.row(triad.i, triad.k)));
    TestOutcome out;
    out.statistic = resid / scale;
    out.null_kind = NullKind::normal;
    out.p_value = 2.0 * (1.0 - normal_cdf(std::abs(out.statistic) / std::sqrt(sigma2)));
    return out;
}

double weighted_chisq_pvalue(const std::vector<double>& eigenvalues, double x, int draws,
                             std::uint64_t seed) {
    if (eigenvalues.empty()) throw config_error("weighted_chisq_pvalue: no eigenvalues");
    double total = 0.0;
    for (double ev : eigenvalues) {
        if (ev < 0.0) throw config_error("weighted_chisq_pvalue: negative eigenvalue");
        total += ev;
    }
    if (total <= 0.0) throw config_error("weighted_chisq_pvalue: all eigenvalues are zero");
    if (draws < 10000) throw config_error("weighted_chisq_pvalue: need at least 10^4 draws");

    auto eng = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    long exceed = 0;
    for (int d = 0; d < draws; ++d) {
        double q = 0.0;
        for (double ev : eigenvalues) {
            const double z = normal(eng);
            q += ev * z * z;
        }
        if (q > x) ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(draws);
}

namespace {

/// Plug-in covariance of U = D^{1/2}(S-bar - nu_s): sigma2 * W^{1/2} M W+ M' W^{1/2}
/// with W = Xi-hat and M = I - A (A' W A)+ A' W. The scale factor n cancels, so
/// this is both the asymptotic and the finite-sample form.
Eigen::MatrixXd residual_covariance(const ComparisonData& data, const BasisPair& bases,
                                    const std::vector<Triad>& triads, double sigma2) {
    const int p = bases.pair_map.size();
    Eigen::MatrixXd design(p, bases.item_count + static_cast<Eigen::Index>(triads.size()));
    design.leftCols(bases.item_count) = bases.linear_basis;
    for (std::size_t t = 0; t < triads.size(); ++t) {
        const Triad& tr = triads[t];
        design.col(bases.item_count + static_cast<Eigen::Index>(t)) =
            bases.cyclic_basis.col(bases.triad_map.col(tr.i, tr.j, tr.k));
    }
    const Eigen::VectorXd w = data.xi_hat();
    const Eigen::MatrixXd gram = design.transpose() * w.asDiagonal() * design;
    const Eigen::MatrixXd m =
        Eigen::MatrixXd::Identity(p, p) -
        design * linalg::pseudo_inverse(gram) * design.transpose() * w.asDiagonal();
    Eigen::VectorXd w_sqrt = w.cwiseSqrt();
    Eigen::VectorXd w_pinv = Eigen::VectorXd::Zero(p);
    for (int r = 0; r < p; ++r) {
        if (w(r) > 0.0) w_pinv(r) = 1.0 / w(r);
    }
    return sigma2 * (w_sqrt.asDiagonal() * m * w_pinv.asDiagonal() * m.transpose() *
                     w_sqrt.asDiagonal());
}

}  // namespace

TestOutcome lack_of_fit(const ComparisonData& data, const BasisPair& bases,
                        const FittedModel& model, const LackOfFitConfig& config) {
    const int p = bases.pair_map.size();
    const int r = model.r();
    const int t = p - (bases.item_count + r - 1);
    if (t <= 0) throw analysis_refusal("lack_of_fit: saturated model, test undefined");

    const Eigen::VectorXd u =
        data.counts().cwiseSqrt().cwiseProduct(data.pair_means() - model.nu);
    const double rn = u.squaredNorm();
    // scale for declaring a residual exactly zero when sigma2 degenerates
    const double rn_floor =
        1e-12 * (1.0 + data.counts().sum() * data.pair_means().squaredNorm());

    double sigma2 = model.sigma2;
    if (config.sigma2_from_model_residuals && model.sigma2 > 0.0) {
        // RSS of the candidate model = within-pair RSS + Rn
        const double rss_within =
            sigma2_hat(data).value * static_cast<double>(data.total_count());
        const long dof = data.total_count() - (bases.item_count - 1 + r);
        sigma2 = dof > 0 ? (rss_within + rn) / static_cast<double>(dof) : 0.0;
    }

    TestOutcome out;
    if (config.variant == LackOfFitVariant::Wald) {
        out.null_kind = NullKind::chisq;
        out.dof = t;
        if (sigma2 <= 0.0) {
            out.statistic = rn <= rn_floor ? 0.0 : std::numeric_limits<double>::infinity();
            out.p_value = rn <= rn_floor ? 1.0 : 0.0;
            return out;
        }
        const Eigen::MatrixXd psi = residual_covariance(data, bases, model.triads, sigma2);
        out.statistic = u.dot(linalg::pseudo_inverse(psi) * u);
        out.p_value =
            boost::math::cdf(boost::math::complement(boost::math::chi_squared(t), out.statistic));
        return out;
    }

    out.statistic = rn;
    out.null_kind = NullKind::weighted_chisq;
    const Eigen::MatrixXd psi = residual_covariance(data, bases, model.triads, sigma2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(psi);
    std::vector<double> evs(eig.eigenvalues().data(), eig.eigenvalues().data() + p);
    std::sort(evs.begin(), evs.end(), std::greater<>());
    evs.resize(static_cast<std::size_t>(t));  // the analytic rank; drop noise eigenvalues
    for (double& ev : evs) ev = std::max(ev, 0.0);
    out.eigenvalues = evs;

    const double total = std::accumulate(evs.begin(), evs.end(), 0.0);
    const long sat_dof = data.total_count() - p;
    if (total <= 0.0) {
        // degenerate sigma2 = 0: the null distribution is a point mass at zero
        out.p_value = rn <= rn_floor ? 1.0 : 0.0;
    } else if (config.exact_small_sample && sat_dof > 0) {
        // joint draw of the mixture and the sigma2-hat denominator; exact
        // under Gaussian errors since the two residual layers are independent
        if (config.mc_draws < 10000) throw config_error("lack_of_fit: need at least 10^4 draws");
        auto eng = make_engine(config.mc_seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::chi_squared_distribution<double> denom(static_cast<double>(sat_dof));
        long exceed = 0;
        for (int d = 0; d < config.mc_draws; ++d) {
            double q = 0.0;
            for (double ev : evs) {
                const double z = normal(eng);
                q += ev * z * z;
            }
            if (q > rn * (denom(eng) / static_cast<double>(sat_dof))) ++exceed;
        }
        out.p_value = static_cast<double>(exceed) / static_cast<double>(config.mc_draws);
    } else {
        out.p_value = weighted_chisq_pvalue(evs, rn, config.mc_draws, config.mc_seed);
    }
    return out;
}

ComponentTestReport component_tests(const ComparisonData& data, const BasisPair& bases,
                                    double level, Correction correction) {
    if (level <= 0.0 || level >= 1.0) throw config_error("component_tests: level must be in (0,1)");
    const int p = bases.pair_map.size();
    const auto& c = bases.cyclic_basis;
    const Eigen::MatrixXd proj = c * linalg::pseudo_inverse(c.transpose() * c) * c.transpose();

    ComponentTestReport rep;
    rep.level = level;
    rep.correction = correction;
    rep.nu_cyclic_hat = proj * data.pair_means();

    const double sigma2 = sigma2_hat_dof(data).value;
    rep.standard_errors.resize(p);
    rep.p_values.resize(static_cast<std::size_t>(p));
    rep.decisions.assign(static_cast<std::size_t>(p), ComponentDecision::accepted);

    const double est_tol = zero_tolerance(rep.nu_cyclic_hat);
    std::vector<int> testable;
    for (int row = 0; row < p; ++row) {
        // Var(nu_cyclic,ij) = sigma2 * [proj D^-1 proj']_jj
        double v = 0.0;
        for (int s = 0; s < p; ++s) v += proj(row, s) * proj(row, s) / data.counts()(s);
        rep.standard_errors(row) = std::sqrt(sigma2 * v);
        if (rep.standard_errors(row) <= 0.0) {
            if (std::abs(rep.nu_cyclic_hat(row)) <= est_tol) {
                rep.decisions[static_cast<std::size_t>(row)] = ComponentDecision::indeterminate;
                rep.p_values[static_cast<std::size_t>(row)] = 1.0;
            } else {
                // exact nonzero estimate with zero noise: the null is plainly false
                rep.decisions[static_cast<std::size_t>(row)] = ComponentDecision::rejected;
                rep.p_values[static_cast<std::size_t>(row)] = 0.0;
            }
            continue;
        }
        const double z = rep.nu_cyclic_hat(row) / rep.standard_errors(row);
        rep.p_values[static_cast<std::size_t>(row)] = 2.0 * (1.0 - normal_cdf(std::abs(z)));
        testable.push_back(row);
    }

    const double denom = static_cast<double>(p);
    if (correction == Correction::bonferroni_fwer) {
        for (int row : testable) {
            if (rep.p_values[static_cast<std::size_t>(row)] < level / denom) {
                rep.decisions[static_cast<std::size_t>(row)] = ComponentDecision::rejected;
            }
        }
    } else {
        // ranks of the raw p-values, ascending, ties broken by pair order
        std::vector<int> order(testable);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return rep.p_values[static_cast<std::size_t>(a)] < rep.p_values[static_cast<std::size_t>(b)];
        });
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const int row = order[pos];
            const double rank = static_cast<double>(pos + 1);
            if (rep.p_values[static_cast<std::size_t>(row)] < level * rank / denom) {
                rep.decisions[static_cast<std::size_t>(row)] = ComponentDecision::rejected;
            }
        }
    }
    return rep;
}

double local_alternative_power(const std::vector<double>& eigenvalues,
                               const std::vector<double>& offsets, double level, int draws,
                               std::uint64_t seed) {
    if (eigenvalues.size() != offsets.size()) {
        throw config_error("local_alternative_power: eigenvalues and offsets differ in length");
    }
    if (level <= 0.0 || level >= 1.0) throw config_error("local_alternative_power: bad level");
    if (eigenvalues.empty()) throw config_error("local_alternative_power: no eigenvalues");

    // null quantile
    std::vector<double> null_draws(static_cast<std::size_t>(draws));
    {
        auto eng = make_engine(derive_seed(seed, 0));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& q : null_draws) {
            double acc = 0.0;
            for (double ev : eigenvalues) {
                const double z = normal(eng);
                acc += ev * z * z;
            }
            q = acc;
        }
    }
    const auto quantile_at =
        null_draws.begin() + static_cast<std::ptrdiff_t>((1.0 - level) * (draws - 1));
    std::nth_element(null_draws.begin(), quantile_at, null_draws.end());
    const double critical = *quantile_at;

    auto eng = make_engine(derive_seed(seed, 1));
    std::normal_distribution<double> normal(0.0, 1.0);
    long exceed = 0;
    for (int d = 0; d < draws; ++d) {
        double q = 0.0;
        for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
            const double z = normal(eng) + offsets[i];
            q += eigenvalues[i] * z * z;
        }
        if (q > critical) ++exceed;
    }
    return static_cast<double>(exceed) / static_cast<double>(draws);
}

}  // namespace paircomp
