#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paircomp/estimate.hpp"
#include "paircomp/geometry.hpp"
#include "paircomp/inference.hpp"

namespace paircomp {

enum class SelectionMethod { fsts, ftbs, fsr, ftbs_fsr, ftbs_fsts };

std::string to_string(SelectionMethod m);
SelectionMethod selection_method_from_string(const std::string& tag);

enum class StepDecision { accepted, rejected, saturated_accept };

struct TraceEntry {
    std::vector<Triad> candidate;  // the model tested at this step
    double p_value = 1.0;
    StepDecision decision = StepDecision::rejected;
};

/// Stage-test configuration the selection algorithms default to: the null is
/// scaled by the candidate model's own residual variance and the variance
/// denominator is drawn jointly (the small-sample behaviour of an F-style
/// lack-of-fit computation).
inline constexpr LackOfFitConfig kSelectionLof{.sigma2_from_model_residuals = true,
                                               .exact_small_sample = true};

struct SelectionConfig {
    double alpha_lof = 0.05;
    double alpha_components = 0.05;  // FTBS support tests
    double alpha_triads = 0.05;      // significance level attached to FSTS triad ranking
    double alpha_fsr = 0.05;         // FSR partial F-test stopping level
    Correction correction = Correction::bonferroni_fwer;
    LackOfFitConfig lof = kSelectionLof;
};

struct SelectionResult {
    SelectionMethod method = SelectionMethod::ftbs;
    std::vector<Triad> triads;   // the selected model, in selection order
    FittedModel fitted;          // fit at the selected triads
    std::vector<TraceEntry> trace;
    std::optional<TickTable> tick_table_used;
    std::optional<ComponentTestReport> component_report;
    SelectionConfig config;
    bool accepted = false;       // false: no candidate model passed its test
};

/// Forward stepwise triad selection: all triads ranked by triad-test p-value
/// (ties by descending |T|, then lexicographic), added one at a time to the
/// linear base until the lack-of-fit test stops rejecting. Candidates whose
/// column is linearly dependent on the current span are skipped.
SelectionResult fsts(const ComparisonData& data, const BasisPair& bases, double alpha_triads,
                     double alpha_lof, const LackOfFitConfig& lof = {});

/// Forward tick-based selection: per-pair cyclic-component tests give the
/// estimated tick-table; the nested models built from the 3-, 2- and 1-tick
/// classes (greedy lexicographic linearly independent subsets) are tested in
/// order and the first accepted one is returned.
SelectionResult ftbs(const ComparisonData& data, const BasisPair& bases, double alpha_components,
                     Correction correction, double alpha_lof, const LackOfFitConfig& lof = {});

/// Classical forward stepwise regression over the triad columns on top of the
/// linear base; at each step the column with the largest RSS reduction enters
/// if its partial F-test p-value is below alpha.
SelectionResult fsr(const ComparisonData& data, const BasisPair& bases, double alpha);

/// FTBS as a screening step: the candidate pool is every triad with at least
/// one estimated tick; the inner method (fsr or fsts) runs on that pool only.
/// An empty pool yields the linear model.
SelectionResult ftbs_screened(const ComparisonData& data, const BasisPair& bases,
                              SelectionMethod inner, const SelectionConfig& config);

/// Dispatch on the method tag with a shared configuration.
SelectionResult run_selection(const ComparisonData& data, const BasisPair& bases,
                              SelectionMethod method, const SelectionConfig& config);

}  // namespace paircomp
