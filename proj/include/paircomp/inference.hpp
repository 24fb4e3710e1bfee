#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "paircomp/estimate.hpp"
#include "paircomp/geometry.hpp"

namespace paircomp {

/// Standard normal CDF (erf-based, ~1e-15 accurate).
double normal_cdf(double x);

enum class NullKind { normal, weighted_chisq, chisq };

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    NullKind null_kind = NullKind::normal;
    std::vector<double> eigenvalues;  // weighted-chisq case, largest first
    std::optional<int> dof;           // chisq case
};

enum class Correction { bonferroni_fwer, bh_fdr };

enum class ComponentDecision : std::uint8_t { accepted, rejected, indeterminate };

/// Per-pair tests of H0: nu_cyclic,ij = 0 with a multiplicity correction.
struct ComponentTestReport {
    Eigen::VectorXd nu_cyclic_hat;      // projection of the pair means onto span(C)
    Eigen::VectorXd standard_errors;
    std::vector<double> p_values;       // raw, one per pair
    std::vector<ComponentDecision> decisions;
    Correction correction = Correction::bonferroni_fwer;
    double level = 0.05;

    bool rejected(int pair_row) const {
        return decisions[static_cast<std::size_t>(pair_row)] == ComponentDecision::rejected;
    }
    /// nu*_cyclic: the estimate with non-rejected entries zeroed out.
    Eigen::VectorXd thresholded() const;
};

inline constexpr int kDefaultMcDraws = 200000;
inline constexpr std::uint64_t kDefaultMcSeed = 0x5EED;

/// T_n = (nu_ij + nu_jk + nu_ki) / sqrt(1/n_ij + 1/n_jk + 1/n_ik) evaluated on
/// the pair means, with a two-sided p-value from N(0, sigma2).
TestOutcome triad_test(const ComparisonData& data, const Triad& triad, double sigma2);

/// Monte-Carlo upper-tail probability of sum_i lambda_i Z_i^2 at x.
/// Deterministic given the seed. All eigenvalues zero is an error.
double weighted_chisq_pvalue(const std::vector<double>& eigenvalues, double x, int draws,
                             std::uint64_t seed);

enum class LackOfFitVariant { Rn, Wald };

struct LackOfFitConfig {
    LackOfFitVariant variant = LackOfFitVariant::Rn;
    int mc_draws = kDefaultMcDraws;
    std::uint64_t mc_seed = kDefaultMcSeed;
    /// Scale the null eigenvalues by the fitted model's own residual variance
    /// (RSS of the candidate model over its residual degrees of freedom)
    /// instead of the saturated-model estimate.
    bool sigma2_from_model_residuals = false;
    /// Account for the sampling noise of sigma2-hat: the Monte-Carlo null
    /// draws an independent chi-square denominator with n - C(K,2) degrees of
    /// freedom alongside each mixture draw (the exact finite-sample null under
    /// Gaussian errors; an F test when the eigenvalues are equal). Off: the
    /// plug-in mixture of the asymptotic theory.
    bool exact_small_sample = false;
};

/// Lack-of-fit test of H0: nu lies in span(B, C_s) for the fitted model.
/// Rn = || D^{1/2}(S-bar - nu_s) ||^2 referred to sum lambda_i Z_i^2 with the
/// lambda_i the t largest eigenvalues of the plug-in residual covariance,
/// t = C(K,2) - (K + r - 1). The Wald variant refers U' Psi^+ U to chi^2_t.
/// Saturated models (t <= 0) are refused.
TestOutcome lack_of_fit(const ComparisonData& data, const BasisPair& bases,
                        const FittedModel& model, const LackOfFitConfig& config = {});

/// Per-pair z-tests of the cyclic component with Bonferroni or BH correction.
/// A pair whose standard error vanishes is marked indeterminate when its
/// estimate also vanishes, and rejected outright (the null is plainly false)
/// when it does not.
ComponentTestReport component_tests(const ComparisonData& data, const BasisPair& bases,
                                    double level, Correction correction);

/// Monte-Carlo power of the Rn test under the shifted representation
/// sum lambda_i (Z_i + offset_i)^2; the critical value is the (1-level)
/// quantile of the null form, estimated from the same number of draws.
double local_alternative_power(const std::vector<double>& eigenvalues,
                               const std::vector<double>& offsets, double level, int draws,
                               std::uint64_t seed);

}  // namespace paircomp
