#include "paircomp/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <random>
#include <thread>

#include "paircomp/linalg.hpp"
#include "paircomp/rng.hpp"

namespace paircomp {

Eigen::VectorXd Scenario::cyclic_profile(const BasisPair& bases) const {
    Eigen::VectorXd nu_c = Eigen::VectorXd::Zero(bases.pair_map.size());
    for (const auto& [triad, coeff] : cyclic_terms) {
        nu_c += coeff * bases.cyclic_basis.col(bases.triad_map.col(triad.i, triad.j, triad.k));
    }
    return nu_c;
}

Eigen::VectorXd Scenario::profile(const BasisPair& bases) const {
    Eigen::VectorXd nu = cyclic_profile(bases);
    if (mu.size() > 0) {
        if (mu.size() != item_count) throw config_error("Scenario: mu length != K");
        nu += bases.linear_basis * mu;
    }
    return nu;
}

std::vector<Triad> Scenario::true_triads() const {
    std::vector<Triad> out;
    out.reserve(cyclic_terms.size());
    for (const auto& [triad, coeff] : cyclic_terms) out.push_back(triad);
    return out;
}

Scenario study_scenario(const std::string& name, int m, std::uint64_t seed) {
    Scenario s;
    s.name = name;
    s.item_count = 6;
    s.sigma = 1.0;
    s.m = m;
    s.seed = seed;
    if (name == "I") {
        s.cyclic_terms = {{{0, 1, 2}, 1.0}, {{0, 3, 4}, -1.0}};
    } else if (name == "II") {
        s.cyclic_terms = {{{0, 3, 4}, 1.0}, {{1, 4, 5}, -1.0}, {{2, 3, 5}, 1.0}};
    } else if (name == "III") {
        s.cyclic_terms = {{{0, 1, 2}, 1.0}, {{0, 1, 3}, -1.0}};
    } else {
        throw config_error("unknown study scenario: " + name);
    }
    return s;
}

ComparisonData generate(const Scenario& scenario, const BasisPair& bases, int replication) {
    if (scenario.m < 1) throw config_error("Scenario: m must be >= 1");
    const Eigen::VectorXd nu = scenario.profile(bases);
    auto eng = make_engine(derive_seed(scenario.seed, static_cast<std::uint64_t>(replication)));
    std::normal_distribution<double> noise(0.0, scenario.sigma);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(nu.size()));
    for (Eigen::Index row = 0; row < nu.size(); ++row) {
        auto& ys = samples[static_cast<std::size_t>(row)];
        ys.reserve(static_cast<std::size_t>(scenario.m));
        for (int t = 0; t < scenario.m; ++t) {
            ys.push_back(nu(row) + (scenario.sigma > 0.0 ? noise(eng) : 0.0));
        }
    }
    return ComparisonData(scenario.item_count, std::move(samples));
}

namespace {

struct RepRecord {
    bool failed = false;
    bool subset = false;
    bool span = false;
    double size_ratio = 0.0;
    double mse_selected = 0.0;
};

bool contains_all(const std::vector<Triad>& selected, const std::vector<Triad>& truth) {
    for (const Triad& t : truth) {
        if (std::find(selected.begin(), selected.end(), t) == selected.end()) return false;
    }
    return true;
}

bool span_contains(const BasisPair& bases, const std::vector<Triad>& selected,
                   const Eigen::VectorXd& nu_cyclic) {
    const double norm = nu_cyclic.norm();
    if (norm < 1e-14) return true;
    if (selected.empty()) return false;
    Eigen::MatrixXd cols(bases.pair_map.size(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t t = 0; t < selected.size(); ++t) {
        const Triad& tr = selected[t];
        cols.col(static_cast<Eigen::Index>(t)) =
            bases.cyclic_basis.col(bases.triad_map.col(tr.i, tr.j, tr.k));
    }
    return std::sqrt(linalg::span_residual_sq(cols, nu_cyclic)) <= 1e-6 * norm;
}

}  // namespace

StudyResult run_study(const Scenario& scenario, const std::vector<SelectionMethod>& methods,
                      int replications, const StudyConfig& config) {
    if (replications < 1) throw config_error("run_study: replications must be >= 1");
    const auto t_start = std::chrono::steady_clock::now();

    const BasisPair bases = build_bases(scenario.item_count);
    const Eigen::VectorXd nu_true = scenario.profile(bases);
    const Eigen::VectorXd nu_cyclic = scenario.cyclic_profile(bases);
    const std::vector<Triad> truth = scenario.true_triads();
    const int true_size = std::max(scenario.true_size(), 1);

    // per-replication records, filled independently and reduced in index order
    // so the aggregate does not depend on the thread schedule
    std::vector<std::vector<RepRecord>> records(
        methods.size(), std::vector<RepRecord>(static_cast<std::size_t>(replications)));
    std::vector<double> mse_true(static_cast<std::size_t>(replications), 0.0);
    std::vector<double> mse_full(static_cast<std::size_t>(replications), 0.0);
    std::vector<double> mse_reduced(static_cast<std::size_t>(replications), 0.0);

    const auto run_rep = [&](int rep) {
        const ComparisonData data = generate(scenario, bases, rep);
        mse_full[static_cast<std::size_t>(rep)] = (fit_full(data) - nu_true).squaredNorm();
        mse_reduced[static_cast<std::size_t>(rep)] =
            (fit_reduced(data, bases).nu - nu_true).squaredNorm();
        mse_true[static_cast<std::size_t>(rep)] =
            (fit_intermediate(data, bases, truth).nu - nu_true).squaredNorm();
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            RepRecord& rec = records[mi][static_cast<std::size_t>(rep)];
            try {
                const SelectionResult sel =
                    run_selection(data, bases, methods[mi], config.selection);
                rec.subset = contains_all(sel.triads, truth);
                rec.span = span_contains(bases, sel.triads, nu_cyclic);
                rec.size_ratio =
                    static_cast<double>(sel.triads.size()) / static_cast<double>(true_size);
                rec.mse_selected = (sel.fitted.nu - nu_true).squaredNorm();
            } catch (const std::exception&) {
                rec.failed = true;
            }
        }
    };

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, replications));
    if (threads == 1) {
        for (int rep = 0; rep < replications; ++rep) run_rep(rep);
    } else {
        std::vector<std::future<void>> futures;
        futures.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            futures.push_back(std::async(std::launch::async, [&, w]() {
                for (int rep = w; rep < replications; rep += threads) run_rep(rep);
            }));
        }
        for (auto& f : futures) f.get();
    }

    StudyResult result;
    result.scenario = scenario;
    result.replications = replications;
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        MethodSummary sum;
        long ok = 0;
        for (const RepRecord& rec : records[mi]) {
            ++sum.runs;
            if (rec.failed) {
                ++sum.failures;
                continue;
            }
            ++ok;
            sum.p_subset += rec.subset ? 1.0 : 0.0;
            sum.p_span += rec.span ? 1.0 : 0.0;
            sum.mean_size_ratio += rec.size_ratio;
            sum.mse_selected += rec.mse_selected;
        }
        if (ok > 0) {
            sum.p_subset /= static_cast<double>(ok);
            sum.p_span /= static_cast<double>(ok);
            sum.mean_size_ratio /= static_cast<double>(ok);
            sum.mse_selected /= static_cast<double>(ok);
        }
        result.methods[methods[mi]] = sum;
    }
    for (int rep = 0; rep < replications; ++rep) {
        result.mse_true += mse_true[static_cast<std::size_t>(rep)];
        result.mse_full += mse_full[static_cast<std::size_t>(rep)];
        result.mse_reduced += mse_reduced[static_cast<std::size_t>(rep)];
    }
    result.mse_true /= replications;
    result.mse_full /= replications;
    result.mse_reduced /= replications;
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace paircomp
