#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "paircomp/betting.hpp"
#include "paircomp/rank.hpp"
#include "paircomp/select.hpp"
#include "paircomp/sim.hpp"

namespace paircomp::io {

using ordered_json = nlohmann::ordered_json;

/// Long-format CSV with header "i,j,y": one comparison per row, 1-based item
/// ids, outcome y for i against j. Rows with i > j are canonicalised to
/// (j, i, -y). Completeness over all pairs of 1..max(id) is enforced.
/// Errors carry the offending line number or the missing pair.
ComparisonData read_long_csv(std::istream& in);
ComparisonData read_long_csv_file(const std::string& path);

struct AnalysisOptions {
    SelectionMethod method = SelectionMethod::ftbs;
    SelectionConfig selection{};
    bool with_betting = false;
};

/// End-to-end analysis: decomposition, triad tests, selection, ranking and
/// (optionally) the betting table of the selected profile against the
/// transitive fit. Refuses betting when the variance estimate is degenerate.
ordered_json analyze(const ComparisonData& data, const AnalysisOptions& options);

/// Betting-only report: transitive fit vs selected model.
ordered_json bet_report(const ComparisonData& data, const AnalysisOptions& options);

/// Declarative study configuration (JSON): scenario, methods, m values,
/// replications, seed.
struct StudySpec {
    std::string scenario;            // "I", "II" or "III"
    int item_count = 6;              // K; the built-in scenarios extend to larger graphs
    std::vector<SelectionMethod> methods;
    std::vector<int> m_values;
    int replications = 1000;
    std::uint64_t seed = 0;
    SelectionConfig selection{};

    static StudySpec parse(const ordered_json& j);
};

/// One row per (scenario, method, m), fixed 6-decimal formatting.
std::string study_table_csv(const std::vector<StudyResult>& results);
ordered_json study_table_json(const std::vector<StudyResult>& results);

}  // namespace paircomp::io
