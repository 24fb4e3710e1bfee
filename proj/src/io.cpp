#include "paircomp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace paircomp::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim spaces and a trailing CR
        const auto first = field.find_first_not_of(" \t\r");
        const auto last = field.find_last_not_of(" \t\r");
        fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
    }
    return fields;
}

int parse_item_id(const std::string& s, long line_no) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value < 1) {
        throw data_error("line " + std::to_string(line_no) + ": bad item id '" + s + "'");
    }
    return value;
}

double parse_outcome(const std::string& s, long line_no) {
    try {
        std::size_t used = 0;
        const double y = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(y)) throw std::invalid_argument(s);
        return y;
    } catch (const std::exception&) {
        throw data_error("line " + std::to_string(line_no) + ": bad outcome '" + s + "'");
    }
}

}  // namespace

ComparisonData read_long_csv(std::istream& in) {
    std::string line;
    long line_no = 0;
    struct Row {
        int i, j;
        double y;
    };
    std::vector<Row> rows;
    int max_id = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (!header_checked) {
            header_checked = true;
            if (fields.size() >= 3 && fields[0] == "i" && fields[1] == "j") continue;  // header
        }
        if (fields.size() != 3) {
            throw data_error("line " + std::to_string(line_no) + ": expected 3 fields i,j,y");
        }
        int i = parse_item_id(fields[0], line_no);
        int j = parse_item_id(fields[1], line_no);
        double y = parse_outcome(fields[2], line_no);
        if (i == j) {
            throw data_error("line " + std::to_string(line_no) + ": item compared with itself");
        }
        if (i > j) {  // canonicalise to the stored orientation
            std::swap(i, j);
            y = -y;
        }
        max_id = std::max(max_id, j);
        rows.push_back({i, j, y});
    }
    if (rows.empty()) throw data_error("no comparison rows found");
    if (max_id < 3) throw data_error("need at least 3 items, found " + std::to_string(max_id));

    const PairIndexMap pm(max_id);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(pm.size()));
    for (const Row& r : rows) {
        samples[static_cast<std::size_t>(pm.row(r.i - 1, r.j - 1))].push_back(r.y);
    }
    for (int row = 0; row < pm.size(); ++row) {
        if (samples[static_cast<std::size_t>(row)].empty()) {
            const Pair p = pm.pair(row);
            throw data_error("incomplete data: no comparisons for pair (" +
                             std::to_string(p.i + 1) + "," + std::to_string(p.j + 1) + ")");
        }
    }
    return ComparisonData(max_id, std::move(samples));
}

ComparisonData read_long_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file: " + path);
    return read_long_csv(in);
}

namespace {

ordered_json vec_to_json(const Eigen::VectorXd& v) {
    ordered_json arr = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

ordered_json triad_to_json(const Triad& t) {
    return ordered_json::array({t.i + 1, t.j + 1, t.k + 1});  // 1-based in reports
}

ordered_json triads_to_json(const std::vector<Triad>& ts) {
    ordered_json arr = ordered_json::array();
    for (const Triad& t : ts) arr.push_back(triad_to_json(t));
    return arr;
}

const char* decision_tag(StepDecision d) {
    switch (d) {
        case StepDecision::accepted: return "accepted";
        case StepDecision::rejected: return "rejected";
        case StepDecision::saturated_accept: return "saturated-accept";
    }
    return "?";
}

const char* correction_tag(Correction c) {
    return c == Correction::bonferroni_fwer ? "bonferroni" : "bh";
}

ordered_json selection_to_json(const SelectionResult& sel) {
    ordered_json j;
    j["method"] = to_string(sel.method);
    j["accepted"] = sel.accepted;
    j["triads"] = triads_to_json(sel.triads);
    j["alpha_lof"] = sel.config.alpha_lof;
    j["alpha_components"] = sel.config.alpha_components;
    j["alpha_triads"] = sel.config.alpha_triads;
    j["alpha_fsr"] = sel.config.alpha_fsr;
    j["correction"] = correction_tag(sel.config.correction);
    ordered_json trace = ordered_json::array();
    for (const TraceEntry& e : sel.trace) {
        ordered_json step;
        step["triads"] = triads_to_json(e.candidate);
        step["p_value"] = e.p_value;
        step["decision"] = decision_tag(e.decision);
        trace.push_back(std::move(step));
    }
    j["trace"] = std::move(trace);
    return j;
}

/// Triad statistic that stays meaningful when the variance estimate
/// degenerates to zero (noiseless input): p collapses to 0/1 on the residual.
std::pair<double, double> triad_stat_p(const ComparisonData& data, const BasisPair& bases,
                                       const Triad& t, double sigma2) {
    if (sigma2 > 0.0) {
        const TestOutcome out = triad_test(data, t, sigma2);
        return {out.statistic, out.p_value};
    }
    const double resid = triad_residual(data.pair_means(), bases.pair_map, t);
    const double scale =
        std::sqrt(1.0 / data.counts()(bases.pair_map.row(t.i, t.j)) +
                  1.0 / data.counts()(bases.pair_map.row(t.j, t.k)) +
                  1.0 / data.counts()(bases.pair_map.row(t.i, t.k)));
    const double tol = 3.0 * zero_tolerance(data.pair_means());
    return {resid / scale, std::abs(resid) > tol ? 0.0 : 1.0};
}

}  // namespace

ordered_json analyze(const ComparisonData& data, const AnalysisOptions& options) {
    const BasisPair bases = build_bases(data.item_count());
    const Sigma2Estimate s2 = sigma2_hat(data);
    if (options.with_betting && (s2.degenerate || s2.value <= 0.0)) {
        throw analysis_refusal("betting requested but the variance estimate is degenerate");
    }

    const Eigen::VectorXd nu_full = fit_full(data);
    const Profile prof = decompose(nu_full, bases);
    const SelectionResult sel = run_selection(data, bases, options.method, options.selection);

    ordered_json j;
    j["items"] = data.item_count();
    j["total_comparisons"] = data.total_count();
    j["sigma2"] = s2.value;
    j["sigma2_degenerate"] = s2.degenerate;

    ordered_json pairs = ordered_json::array();
    for (const Pair& p : bases.pair_map.pairs()) {
        pairs.push_back(ordered_json::array({p.i + 1, p.j + 1}));
    }
    j["pairs"] = std::move(pairs);

    ordered_json dec;
    dec["nu"] = vec_to_json(prof.nu);
    dec["nu_linear"] = vec_to_json(prof.nu_linear);
    dec["nu_cyclic"] = vec_to_json(prof.nu_cyclic);
    dec["mu"] = vec_to_json(prof.mu);
    dec["gamma_minnorm"] = vec_to_json(prof.gamma_minnorm);
    j["decomposition"] = std::move(dec);

    ordered_json triad_tests = ordered_json::array();
    for (const Triad& t : bases.triad_map.triads()) {
        const auto [stat, p] = triad_stat_p(data, bases, t, s2.value);
        ordered_json entry;
        entry["triad"] = triad_to_json(t);
        entry["statistic"] = stat;
        entry["p_value"] = p;
        triad_tests.push_back(std::move(entry));
    }
    j["triad_tests"] = std::move(triad_tests);

    j["selection"] = selection_to_json(sel);

    ordered_json fit;
    fit["mu"] = vec_to_json(sel.fitted.mu);
    fit["gamma"] = vec_to_json(sel.fitted.gamma);
    fit["nu"] = vec_to_json(sel.fitted.nu);
    fit["rank_deficient"] = sel.fitted.rank_deficient;
    j["fit"] = std::move(fit);

    // rankings: merits from the selected model; dominance and rank sets from
    // the saturated pair means (the observable profile)
    ordered_json ranking;
    ranking["merits"] = vec_to_json(sel.fitted.mu);
    ordered_json merit_ranks = ordered_json::array();
    for (int i = 0; i < data.item_count(); ++i) {
        int rank = 1;
        for (int l = 0; l < data.item_count(); ++l) {
            if (sel.fitted.mu(l) > sel.fitted.mu(i)) ++rank;
        }
        merit_ranks.push_back(rank);
    }
    ranking["merit_ranks"] = std::move(merit_ranks);
    ranking["pseudo_merits"] = vec_to_json(pseudo_merits(nu_full, bases.pair_map));
    const DominanceResult dom = dominance_scores(nu_full, bases.pair_map);
    ranking["dominance_scores"] = vec_to_json(dom.scores);
    ranking["dominance_ranks"] = vec_to_json(dom.ranks);
    const RankSets sets = rank_sets(nu_full, bases.pair_map);
    ordered_json sets_json = ordered_json::array();
    for (int i = 0; i < data.item_count(); ++i) {
        ordered_json entry;
        entry["item"] = i + 1;
        ordered_json sup = ordered_json::array(), inf = ordered_json::array(),
                     eq = ordered_json::array();
        for (int v : sets.superior[static_cast<std::size_t>(i)]) sup.push_back(v + 1);
        for (int v : sets.inferior[static_cast<std::size_t>(i)]) inf.push_back(v + 1);
        for (int v : sets.equivalent[static_cast<std::size_t>(i)]) eq.push_back(v + 1);
        entry["superior"] = std::move(sup);
        entry["inferior"] = std::move(inf);
        entry["equivalent"] = std::move(eq);
        sets_json.push_back(std::move(entry));
    }
    ranking["rank_sets"] = std::move(sets_json);

    const TransitivityReport trans = classify_transitivity(sel.fitted.nu, bases.pair_map);
    ordered_json trans_json;
    trans_json["global"] = trans.global == TransitivityGrade::cyclic ? "intransitive"
                                                                     : to_string(trans.global);
    ordered_json cyclic_triads = ordered_json::array();
    for (const TriadTransitivity& tt : trans.per_triad) {
        if (tt.grade == TransitivityGrade::cyclic) cyclic_triads.push_back(triad_to_json(tt.triad));
    }
    trans_json["cyclic_triads"] = std::move(cyclic_triads);
    ranking["transitivity"] = std::move(trans_json);
    j["ranking"] = std::move(ranking);

    if (options.with_betting) {
        const FittedModel reduced = fit_reduced(data, bases);
        const BettingReport bet = total_win(reduced.nu, sel.fitted.nu, std::sqrt(s2.value));
        ordered_json bj;
        bj["sigma"] = std::sqrt(s2.value);
        bj["omega"] = vec_to_json(bet.omega);
        bj["tau"] = vec_to_json(bet.tau);
        bj["win"] = vec_to_json(bet.win);
        bj["total_win"] = bet.total_win;
        j["betting"] = std::move(bj);
    }
    return j;
}

ordered_json bet_report(const ComparisonData& data, const AnalysisOptions& options) {
    AnalysisOptions opts = options;
    opts.with_betting = true;
    const ordered_json full = analyze(data, opts);
    ordered_json j;
    j["items"] = full["items"];
    j["pairs"] = full["pairs"];
    j["selection"] = full["selection"];
    j["betting"] = full["betting"];
    return j;
}

StudySpec StudySpec::parse(const ordered_json& j) {
    StudySpec spec;
    try {
        spec.scenario = j.at("scenario").get<std::string>();
        for (const auto& m : j.at("methods")) {
            spec.methods.push_back(selection_method_from_string(m.get<std::string>()));
        }
        for (const auto& m : j.at("m")) {
            const int v = m.get<int>();
            if (v < 1) throw config_error("study spec: m values must be >= 1");
            spec.m_values.push_back(v);
        }
        spec.replications = j.value("replications", 1000);
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.item_count = j.value("k", 6);
        if (spec.item_count < 6) throw config_error("study spec: k must be >= 6");
        if (j.contains("alpha_lof")) spec.selection.alpha_lof = j["alpha_lof"].get<double>();
        if (j.contains("alpha_components")) {
            spec.selection.alpha_components = j["alpha_components"].get<double>();
        }
        if (j.contains("alpha_triads")) spec.selection.alpha_triads = j["alpha_triads"].get<double>();
        if (j.contains("alpha_fsr")) spec.selection.alpha_fsr = j["alpha_fsr"].get<double>();
        if (j.contains("correction")) {
            const std::string tag = j["correction"].get<std::string>();
            if (tag == "bonferroni") {
                spec.selection.correction = Correction::bonferroni_fwer;
            } else if (tag == "bh") {
                spec.selection.correction = Correction::bh_fdr;
            } else {
                throw config_error("study spec: unknown correction '" + tag + "'");
            }
        }
        if (j.contains("lof_draws")) spec.selection.lof.mc_draws = j["lof_draws"].get<int>();
        if (j.contains("lof_seed")) spec.selection.lof.mc_seed = j["lof_seed"].get<std::uint64_t>();
    } catch (const ordered_json::exception& e) {
        throw config_error(std::string("study spec: ") + e.what());
    }
    if (spec.methods.empty()) throw config_error("study spec: no methods listed");
    if (spec.m_values.empty()) throw config_error("study spec: no m values listed");
    if (spec.replications < 1) throw config_error("study spec: replications must be >= 1");
    return spec;
}

namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

std::string study_table_csv(const std::vector<StudyResult>& results) {
    std::string out =
        "scenario,method,m,replications,p_subset,p_span,size_ratio,"
        "mse_true,mse_selected,mse_full,mse_reduced,failures\n";
    for (const StudyResult& r : results) {
        for (const auto& [method, sum] : r.methods) {
            out += r.scenario.name + ',' + to_string(method) + ',' +
                   std::to_string(r.scenario.m) + ',' + std::to_string(r.replications) + ',' +
                   fmt6(sum.p_subset) + ',' + fmt6(sum.p_span) + ',' +
                   fmt6(sum.mean_size_ratio) + ',' + fmt6(r.mse_true) + ',' +
                   fmt6(sum.mse_selected) + ',' + fmt6(r.mse_full) + ',' + fmt6(r.mse_reduced) +
                   ',' + std::to_string(sum.failures) + '\n';
        }
    }
    return out;
}

ordered_json study_table_json(const std::vector<StudyResult>& results) {
    ordered_json rows = ordered_json::array();
    for (const StudyResult& r : results) {
        for (const auto& [method, sum] : r.methods) {
            ordered_json row;
            row["scenario"] = r.scenario.name;
            row["method"] = to_string(method);
            row["m"] = r.scenario.m;
            row["replications"] = r.replications;
            row["p_subset"] = sum.p_subset;
            row["p_span"] = sum.p_span;
            row["size_ratio"] = sum.mean_size_ratio;
            row["mse_true"] = r.mse_true;
            row["mse_selected"] = sum.mse_selected;
            row["mse_full"] = r.mse_full;
            row["mse_reduced"] = r.mse_reduced;
            row["failures"] = sum.failures;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace paircomp::io
