// Command-line front end: ingest-check | analyze | simulate | bet.
// Exit codes: 0 success, 2 data error, 3 config error, 4 analysis refusal.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "paircomp/io.hpp"

namespace {

using paircomp::io::ordered_json;

struct CommonFlags {
    std::string method = "ftbs";
    double alpha_lof = 0.05;
    double alpha_comp = 0.05;
    std::string correction = "bonferroni";
    std::uint64_t seed = paircomp::kDefaultMcSeed;
    std::string out;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--method", flags.method, "selection method")
        ->check(CLI::IsMember({"ftbs", "fsts", "fsr", "ftbs-fsr", "ftbs-fsts"}));
    cmd->add_option("--alpha-lof", flags.alpha_lof, "lack-of-fit level");
    cmd->add_option("--alpha-comp", flags.alpha_comp, "component-test level");
    cmd->add_option("--correction", flags.correction, "multiple-testing correction")
        ->check(CLI::IsMember({"bonferroni", "bh"}));
    cmd->add_option("--seed", flags.seed, "Monte-Carlo seed");
    cmd->add_option("--out", flags.out, "output file (default: stdout)");
}

paircomp::io::AnalysisOptions to_options(const CommonFlags& flags) {
    paircomp::io::AnalysisOptions opts;
    opts.method = paircomp::selection_method_from_string(flags.method);
    opts.selection.alpha_lof = flags.alpha_lof;
    opts.selection.alpha_components = flags.alpha_comp;
    opts.selection.correction = flags.correction == "bh"
                                    ? paircomp::Correction::bh_fdr
                                    : paircomp::Correction::bonferroni_fwer;
    opts.selection.lof.mc_seed = flags.seed;
    return opts;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw paircomp::config_error("cannot open output file: " + path);
    out << content;
}

int run(int argc, char** argv) {
    CLI::App app{"cyclic paired-comparison analysis"};
    app.require_subcommand(1);

    std::string ingest_path;
    CLI::App* ingest = app.add_subcommand("ingest-check", "validate a long-format CSV");
    ingest->add_option("file", ingest_path, "CSV file with header i,j,y")->required();

    std::string analyze_path;
    bool with_betting = false;
    CommonFlags analyze_flags;
    CLI::App* analyze = app.add_subcommand("analyze", "full analysis to a JSON report");
    analyze->add_option("file", analyze_path, "CSV file with header i,j,y")->required();
    analyze->add_flag("--bet", with_betting, "include the betting table");
    add_common_flags(analyze, analyze_flags);

    std::string bet_path;
    CommonFlags bet_flags;
    CLI::App* bet = app.add_subcommand("bet", "betting gains of the selected model");
    bet->add_option("file", bet_path, "CSV file with header i,j,y")->required();
    add_common_flags(bet, bet_flags);

    std::string sim_config_path;
    std::string sim_out = "study";
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation study");
    simulate->add_option("config", sim_config_path, "JSON study configuration")->required();
    simulate->add_option("--out", sim_out, "output prefix (<out>.csv, <out>.json)");
    simulate->add_option("--seed", sim_seed, "override the study seed")
        ->trigger_on_parse()
        ->each([&](const std::string&) { sim_seed_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 3;
    }

    if (ingest->parsed()) {
        const paircomp::ComparisonData data = paircomp::io::read_long_csv_file(ingest_path);
        long max_count = 0, min_count = data.count(0);
        for (int row = 0; row < data.pair_map().size(); ++row) {
            max_count = std::max<long>(max_count, data.count(row));
            min_count = std::min<long>(min_count, data.count(row));
        }
        std::cout << "ok: " << data.item_count() << " items, " << data.total_count()
                  << " comparisons, per-pair counts " << min_count << ".." << max_count << '\n';
        return 0;
    }
    if (analyze->parsed()) {
        const paircomp::ComparisonData data = paircomp::io::read_long_csv_file(analyze_path);
        paircomp::io::AnalysisOptions opts = to_options(analyze_flags);
        opts.with_betting = with_betting;
        write_output(analyze_flags.out, paircomp::io::analyze(data, opts).dump(2));
        return 0;
    }
    if (bet->parsed()) {
        const paircomp::ComparisonData data = paircomp::io::read_long_csv_file(bet_path);
        write_output(bet_flags.out, paircomp::io::bet_report(data, to_options(bet_flags)).dump(2));
        return 0;
    }
    if (simulate->parsed()) {
        std::ifstream in(sim_config_path);
        if (!in) throw paircomp::config_error("cannot open config file: " + sim_config_path);
        ordered_json config_json;
        try {
            in >> config_json;
        } catch (const ordered_json::exception& e) {
            throw paircomp::config_error("config parse error: " + std::string(e.what()));
        }
        paircomp::io::StudySpec spec = paircomp::io::StudySpec::parse(config_json);
        if (sim_seed_set) spec.seed = sim_seed;

        std::vector<paircomp::StudyResult> results;
        for (int m : spec.m_values) {
            paircomp::Scenario scenario = paircomp::study_scenario(spec.scenario, m, spec.seed);
            scenario.item_count = spec.item_count;
            paircomp::StudyConfig study_config;
            study_config.selection = spec.selection;
            results.push_back(
                paircomp::run_study(scenario, spec.methods, spec.replications, study_config));
        }
        write_output(sim_out + ".csv", paircomp::io::study_table_csv(results));
        write_output(sim_out + ".json", paircomp::io::study_table_json(results).dump(2));
        std::cout << "wrote " << sim_out << ".csv and " << sim_out << ".json\n";
        return 0;
    }
    return 3;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const paircomp::data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const paircomp::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const paircomp::analysis_refusal& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
