// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria that need an external data set are skipped (not
// failed) when the file is absent.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "paircomp/betting.hpp"
#include "paircomp/io.hpp"
#include "paircomp/linalg.hpp"
#include "paircomp/rank.hpp"
#include "paircomp/rng.hpp"
#include "paircomp/select.hpp"
#include "paircomp/sim.hpp"

using namespace paircomp;

namespace {

int g_failures = 0;
std::vector<std::string> g_details;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
    std::printf("%s  criterion %2d  %-38s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", number,
                name.c_str(), seconds, detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void report_skip(int number, const std::string& name, const std::string& why) {
    std::printf("SKIP  criterion %2d  %-38s -- %s\n", number, name.c_str(), why.c_str());
    std::fflush(stdout);
}

class Timer {
public:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

bool close(double value, double target, double tol, const char* what, std::string& detail) {
    if (std::abs(value - target) <= tol) return true;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.4f, want %.4f +- %.3f; ", what, value, target, tol);
    detail += buf;
    return false;
}

// ---------------------------------------------------------------------------
// 1. basis correctness
// ---------------------------------------------------------------------------
void criterion1() {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (int k = 3; k <= 8; ++k) {
        const BasisPair b = build_bases(k);
        if (linalg::svd_rank(b.linear_basis) != k - 1) {
            pass = false;
            detail += "rank(B) wrong at K=" + std::to_string(k) + "; ";
        }
        if (linalg::svd_rank(b.cyclic_basis) != (k - 1) * (k - 2) / 2) {
            pass = false;
            detail += "rank(C) wrong at K=" + std::to_string(k) + "; ";
        }
        // exact integer orthogonality
        long long worst = 0;
        for (int bc = 0; bc < k; ++bc) {
            for (int cc = 0; cc < b.triad_map.size(); ++cc) {
                long long dot = 0;
                for (int row = 0; row < b.pair_map.size(); ++row) {
                    dot += static_cast<long long>(b.linear_basis(row, bc)) *
                           static_cast<long long>(b.cyclic_basis(row, cc));
                }
                worst = std::max(worst, std::llabs(dot));
            }
        }
        if (worst != 0) {
            pass = false;
            detail += "B^T C != 0 at K=" + std::to_string(k) + "; ";
        }
    }
    const BasisPair b3 = build_bases(3);
    pass = pass && b3.linear_basis.col(0) == Eigen::Vector3d(1, 1, 0) &&
           b3.linear_basis.col(1) == Eigen::Vector3d(-1, 0, 1) &&
           b3.linear_basis.col(2) == Eigen::Vector3d(0, -1, -1);
    const BasisPair b4 = build_bases(4);
    Eigen::VectorXd c123(6);
    c123 << 1, -1, 0, 1, 0, 0;
    pass = pass && b4.cyclic_basis.col(b4.triad_map.col(0, 1, 2)) == c123;
    const double secs = timer.elapsed();
    if (secs >= 1.0) {
        pass = false;
        detail += "runtime over 1s; ";
    }
    report(1, "basis correctness K=3..8", pass, secs, detail);
}

// ---------------------------------------------------------------------------
// 2. weighted-merit goldens (complete vs path weighting)
// ---------------------------------------------------------------------------
void criterion2() {
    Timer timer;
    const BasisPair b = build_bases(4);
    Eigen::VectorXd nu(6);
    nu << -2, 0, 2, 0, 2, 0;

    const Eigen::VectorXd mu_complete =
        weighted_merits(nu, Eigen::VectorXd::Constant(6, 1.0 / 6.0), b);
    Eigen::VectorXd want_complete(4);
    want_complete << 0, 1, 0, -1;

    Eigen::VectorXd path = Eigen::VectorXd::Zero(6);
    path(b.pair_map.row(0, 1)) = 1.0 / 3.0;
    path(b.pair_map.row(1, 2)) = 1.0 / 3.0;
    path(b.pair_map.row(2, 3)) = 1.0 / 3.0;
    const Eigen::VectorXd mu_path = weighted_merits(nu, path, b);
    Eigen::VectorXd want_path(4);
    want_path << -1.5, 0.5, 0.5, 0.5;

    const bool pass = (mu_complete - want_complete).cwiseAbs().maxCoeff() <= 1e-9 &&
                      (mu_path - want_path).cwiseAbs().maxCoeff() <= 1e-9;
    report(2, "merit goldens, complete and path", pass, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 3. joint minimum-norm golden at K=5
// ---------------------------------------------------------------------------
void criterion3() {
    Timer timer;
    const BasisPair b = build_bases(5);
    Eigen::VectorXd mu(5);
    mu << 2, 1, 0, -1, -2;
    Eigen::VectorXd nu = b.linear_basis * mu;
    nu += b.cyclic_basis.col(b.triad_map.col(0, 1, 2));

    std::vector<std::vector<double>> samples(static_cast<std::size_t>(nu.size()));
    for (Eigen::Index r = 0; r < nu.size(); ++r) {
        samples[static_cast<std::size_t>(r)].assign(4, nu(r));
    }
    const ComparisonData data(5, std::move(samples));
    const auto [mu_hat, gamma_hat] = fit_joint_minnorm(data, b);

    Eigen::VectorXd want(10);
    want << 0.6, 0.2, 0.2, -0.2, -0.2, 0, 0.2, 0.2, 0, 0;
    const bool pass = (gamma_hat - want).cwiseAbs().maxCoeff() <= 1e-8 &&
                      std::abs(gamma_hat.norm() - std::sqrt(0.6)) <= 1e-8;
    report(3, "joint min-norm gamma golden", pass, timer.elapsed());
}

// ---------------------------------------------------------------------------
// 4. size calibration of the triad test and the Rn lack-of-fit test
// ---------------------------------------------------------------------------
void criterion4() {
    Timer timer;
    const int reps = 5000, m = 50;
    const BasisPair b = build_bases(6);
    Scenario scenario = study_scenario("I", m, 0xCA11B);
    const std::vector<Triad> truth = scenario.true_triads();
    const LackOfFitConfig lof{.mc_draws = 20000};

    int triad_rej = 0, rn_rej = 0;
    for (int r = 0; r < reps; ++r) {
        const ComparisonData data = generate(scenario, b, r);
        // triad (1,3,5) carries no cyclic signal in this scenario: a true null
        const double s2 = sigma2_hat(data).value;
        if (triad_test(data, {1, 3, 5}, s2).p_value < 0.05) ++triad_rej;
        const FittedModel fit = fit_intermediate(data, b, truth);
        if (lack_of_fit(data, b, fit, lof).p_value < 0.05) ++rn_rej;
    }
    std::string detail;
    bool pass = true;
    pass &= close(static_cast<double>(triad_rej) / reps, 0.05, 0.015, "triad size", detail);
    pass &= close(static_cast<double>(rn_rej) / reps, 0.05, 0.015, "Rn size", detail);
    const double secs = timer.elapsed();
    if (secs >= 300.0) {
        pass = false;
        detail += "runtime over 5 min; ";
    }
    report(4, "test size calibration at alpha=0.05", pass, secs, detail);
}

// ---------------------------------------------------------------------------
// 5..8. simulation-study reproduction
// ---------------------------------------------------------------------------
struct PaperRow {
    double p, size;
};

const std::map<std::string, std::map<SelectionMethod, std::map<int, PaperRow>>> kTable2 = {
    {"I",
     {{SelectionMethod::fsr, {{5, {0.842, 1.30}}, {10, {0.987, 1.33}}, {20, {1.0, 1.31}}}},
      {SelectionMethod::ftbs, {{5, {0.312, 1.33}}, {10, {0.853, 1.52}}, {20, {1.0, 1.06}}}},
      {SelectionMethod::fsts, {{5, {0.209, 0.66}}, {10, {0.764, 0.97}}, {20, {0.993, 1.03}}}}}},
    {"II",
     {{SelectionMethod::fsr, {{5, {0.738, 1.17}}, {10, {0.973, 1.17}}, {20, {0.998, 1.18}}}},
      {SelectionMethod::ftbs, {{5, {0.191, 1.70}}, {10, {0.673, 1.82}}, {20, {0.999, 1.38}}}},
      {SelectionMethod::fsts, {{5, {0.066, 0.71}}, {10, {0.568, 1.01}}, {20, {0.986, 1.08}}}}}}};

struct StudyBank {
    // keyed by (scenario, m)
    std::map<std::pair<std::string, int>, StudyResult> runs;
    const StudyResult& at(const std::string& scenario, int m) const {
        return runs.at({scenario, m});
    }
};

StudyBank run_all_studies() {
    StudyBank bank;
    StudyConfig config;
    config.selection.lof.mc_draws = 20000;  // calibration-grade tail accuracy, study-scale runtime
    const std::vector<SelectionMethod> methods = {SelectionMethod::ftbs, SelectionMethod::fsts,
                                                  SelectionMethod::fsr};
    const std::uint64_t seed = 20250810;
    for (const std::string scenario : {"I", "II"}) {
        for (int m : {5, 10, 20}) {
            bank.runs[{scenario, m}] =
                run_study(study_scenario(scenario, m, seed), methods, 1000, config);
            std::printf("  [study] scenario %-3s m=%-2d done (%.1fs)\n", scenario.c_str(), m,
                        bank.runs[{scenario, m}].runtime_seconds);
            std::fflush(stdout);
        }
    }
    bank.runs[{"III", 20}] = run_study(study_scenario("III", 20, seed), methods, 1000, config);
    std::printf("  [study] scenario III m=20 done (%.1fs)\n",
                bank.runs[{"III", 20}].runtime_seconds);
    bank.runs[{"I", 40}] =
        run_study(study_scenario("I", 40, seed), {SelectionMethod::ftbs}, 1000, config);
    std::printf("  [study] scenario I   m=40 done (%.1fs)\n", bank.runs[{"I", 40}].runtime_seconds);
    std::fflush(stdout);
    return bank;
}

void criterion5(const StudyBank& bank, double study_seconds) {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (const auto& [scenario, by_method] : kTable2) {
        for (const auto& [method, by_m] : by_method) {
            for (const auto& [m, row] : by_m) {
                const MethodSummary& sum = bank.at(scenario, m).methods.at(method);
                char what[64];
                std::snprintf(what, sizeof what, "%s %s m=%d P", scenario.c_str(),
                              to_string(method).c_str(), m);
                pass &= close(sum.p_subset, row.p, 0.05, what, detail);
                std::snprintf(what, sizeof what, "%s %s m=%d E", scenario.c_str(),
                              to_string(method).c_str(), m);
                pass &= close(sum.mean_size_ratio, row.size, 0.2, what, detail);
            }
        }
    }
    report(5, "scenario I/II study reproduction", pass, study_seconds + timer.elapsed(), detail);
}

void criterion6(const StudyBank& bank) {
    Timer timer;
    std::string detail;
    const MethodSummary& sum = bank.at("III", 20).methods.at(SelectionMethod::ftbs);
    bool pass = sum.p_span >= 0.96;
    if (!pass) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "p_span = %.4f < 0.96; ", sum.p_span);
        detail += buf;
    }
    pass &= close(sum.mean_size_ratio, 1.57, 0.25, "size ratio", detail);
    report(6, "scenario III span recovery", pass, timer.elapsed(), detail);
}

void criterion7(const StudyBank& bank) {
    Timer timer;
    bool pass = true;
    std::string detail;
    const std::map<std::string, std::pair<double, double>> mse_targets = {
        {"I", {6.252, 0.369}}, {"II", {9.252, 0.483}}, {"III", {4.252, 0.436}}};
    for (const auto& [scenario, targets] : mse_targets) {
        const StudyResult& res = bank.at(scenario, 20);
        char what[64];
        std::snprintf(what, sizeof what, "%s full MSE", scenario.c_str());
        pass &= close(res.mse_full, 0.745, 0.05, what, detail);
        std::snprintf(what, sizeof what, "%s reduced MSE", scenario.c_str());
        pass &= close(res.mse_reduced, targets.first, 0.3, what, detail);
        std::snprintf(what, sizeof what, "%s selected MSE", scenario.c_str());
        pass &= close(res.methods.at(SelectionMethod::ftbs).mse_selected, targets.second, 0.15,
                      what, detail);
    }
    report(7, "model-class MSE reproduction", pass, timer.elapsed(), detail);
}

void criterion8(const StudyBank& bank) {
    Timer timer;
    bool pass = true;
    std::string detail;
    double prev = -1.0;
    const int reps = 1000;
    for (int m : {5, 10, 20, 40}) {
        const double p = bank.at("I", m).methods.at(SelectionMethod::ftbs).p_span;
        if (prev >= 0.0) {
            const double se = std::sqrt(std::max(prev * (1.0 - prev), 1.0 / reps) / reps);
            if (p < prev - 2.0 * se) {
                pass = false;
                char buf[96];
                std::snprintf(buf, sizeof buf, "p_span drops at m=%d (%.4f -> %.4f); ", m, prev, p);
                detail += buf;
            }
        }
        prev = p;
        if (m == 40 && p < 0.99) {
            pass = false;
            char buf[64];
            std::snprintf(buf, sizeof buf, "p_span(m=40) = %.4f < 0.99; ", p);
            detail += buf;
        }
    }
    report(8, "consistency trend in m", pass, timer.elapsed(), detail);
}

// ---------------------------------------------------------------------------
// 9. property suites
// ---------------------------------------------------------------------------
void criterion9() {
    Timer timer;
    bool pass = true;
    std::string detail;
    auto eng = make_engine(0xACCE);
    std::normal_distribution<double> normal(0.0, 1.0);

    // projection idempotence and orthogonality
    {
        const BasisPair b = build_bases(5);
        for (int rep = 0; rep < 10; ++rep) {
            Eigen::VectorXd nu(b.pair_map.size());
            for (Eigen::Index r = 0; r < nu.size(); ++r) nu(r) = normal(eng);
            const Profile p = decompose(nu, b);
            if (std::abs(p.nu_linear.dot(p.nu_cyclic)) > 1e-10 ||
                (p.nu_linear + p.nu_cyclic - nu).norm() > 1e-10 ||
                decompose(p.nu_linear, b).nu_cyclic.norm() > 1e-10 ||
                decompose(p.nu_cyclic, b).nu_linear.norm() > 1e-10) {
                pass = false;
                detail += "projection identity failed; ";
                break;
            }
        }
    }

    // superposition identity, exact integers, K <= 7
    for (int k = 4; k <= 7 && pass; ++k) {
        const BasisPair b = build_bases(k);
        for (const Triad& t : b.triad_map.triads()) {
            for (int s = 0; s < k; ++s) {
                if (s == t.i || s == t.j || s == t.k) continue;
                const Eigen::VectorXd lhs = b.cyclic_basis.col(b.triad_map.col(t.i, t.j, t.k));
                const Eigen::VectorXd rhs = cycle_vector({s, t.i, t.j}, b) +
                                            cycle_vector({s, t.j, t.k}, b) -
                                            cycle_vector({s, t.i, t.k}, b);
                if ((lhs - rhs).cwiseAbs().maxCoeff() != 0.0) {
                    pass = false;
                    detail += "superposition identity failed; ";
                    break;
                }
            }
        }
    }

    // oracle vs tick-table structure: the worked non-unique example ...
    {
        const BasisPair b = build_bases(6);
        const Eigen::VectorXd nu_c =
            b.cyclic_basis.col(b.triad_map.col(0, 1, 2)) -
            b.cyclic_basis.col(b.triad_map.col(0, 1, 3)) +
            b.cyclic_basis.col(b.triad_map.col(0, 2, 5)) -
            b.cyclic_basis.col(b.triad_map.col(1, 2, 4));
        const auto models = minimal_models_oracle(nu_c, b, 5);
        const std::vector<Triad> alt = {{0, 2, 3}, {0, 2, 5}, {1, 2, 3}, {1, 2, 4}};
        if (models.size() < 2 || models[0].size() != 4 ||
            std::find(models.begin(), models.end(), alt) == models.end()) {
            pass = false;
            detail += "non-unique minimal model example failed; ";
        }
        // ... and random index-disjoint instances with distinct coefficients
        std::uniform_real_distribution<double> coef(0.5, 0.9);
        for (int rep = 0; rep < 5 && pass; ++rep) {
            const double c1 = 1.0 + 0.1 * rep, c2 = coef(eng);
            const Eigen::VectorXd v = c1 * b.cyclic_basis.col(b.triad_map.col(0, 1, 2)) -
                                      c2 * b.cyclic_basis.col(b.triad_map.col(3, 4, 5));
            const auto found = minimal_models_oracle(v, b, 4);
            const TickTable tt = tick_table(v, b, zero_tolerance(v));
            const std::vector<Triad> want = {{0, 1, 2}, {3, 4, 5}};
            if (found.size() != 1 || found[0] != want ||
                tt.tick_count(b.triad_map.col(0, 1, 2)) != 3 ||
                tt.tick_count(b.triad_map.col(3, 4, 5)) != 3) {
                pass = false;
                detail += "unique minimal model property failed; ";
            }
            // no-0-tick representative must exist among the returned models
            bool fully_ticked = false;
            for (const auto& model : found) {
                bool all = true;
                for (const Triad& t : model) {
                    if (tt.tick_count(b.triad_map.col(t.i, t.j, t.k)) == 0) all = false;
                }
                fully_ticked |= all;
            }
            if (!fully_ticked) {
                pass = false;
                detail += "0-tick representative property failed; ";
            }
        }
    }

    // rank-t eigenvalue count of the residual covariance
    {
        for (int k = 4; k <= 6 && pass; ++k) {
            const BasisPair b = build_bases(k);
            Eigen::VectorXd nu(b.pair_map.size());
            for (Eigen::Index r = 0; r < nu.size(); ++r) nu(r) = normal(eng);
            std::vector<std::vector<double>> samples(static_cast<std::size_t>(nu.size()));
            for (Eigen::Index r = 0; r < nu.size(); ++r) {
                for (int d = 0; d < 5; ++d) {
                    samples[static_cast<std::size_t>(r)].push_back(nu(r) + normal(eng));
                }
            }
            const ComparisonData data(k, std::move(samples));
            for (int r = 0; r <= 2; ++r) {
                std::vector<Triad> triads;
                if (r >= 1) triads.push_back({0, 1, 2});
                if (r >= 2) triads.push_back({0, 1, 3});
                const FittedModel fm = fit_intermediate(data, b, triads);
                const TestOutcome out = lack_of_fit(data, b, fm, {.mc_draws = 20000});
                const int t = b.pair_map.size() - (k + r - 1);
                bool ok = static_cast<int>(out.eigenvalues.size()) == t;
                for (double ev : out.eigenvalues) ok &= ev > 1e-8;
                if (!ok) {
                    pass = false;
                    detail += "eigenvalue rank failed; ";
                }
            }
        }
    }

    // dominance / rank-set partition invariants
    {
        const BasisPair b = build_bases(6);
        for (int rep = 0; rep < 10 && pass; ++rep) {
            Eigen::VectorXd nu(b.pair_map.size());
            for (Eigen::Index r = 0; r < nu.size(); ++r) nu(r) = normal(eng);
            const RankSets sets = rank_sets(nu, b.pair_map);
            const DominanceResult dom = dominance_scores(nu, b.pair_map);
            for (int i = 0; i < 6; ++i) {
                if (sets.superior[static_cast<std::size_t>(i)].size() +
                        sets.inferior[static_cast<std::size_t>(i)].size() +
                        sets.equivalent[static_cast<std::size_t>(i)].size() !=
                    5) {
                    pass = false;
                    detail += "rank-set partition failed; ";
                }
                if (dom.scores(i) < 0 || dom.scores(i) > 5) {
                    pass = false;
                    detail += "dominance score range failed; ";
                }
                for (int j : sets.superior[static_cast<std::size_t>(i)]) {
                    const auto& inf = sets.inferior[static_cast<std::size_t>(j)];
                    if (std::find(inf.begin(), inf.end(), i) == inf.end()) {
                        pass = false;
                        detail += "rank-set antisymmetry failed; ";
                    }
                }
            }
        }
    }

    // betting piecewise formula exactness
    {
        if (expected_gain(0.75, 0.5) != 0.5 || expected_gain(0.5, 0.75) != 1.0 ||
            expected_gain(0.31, 0.31) != 0.0 ||
            std::abs(expected_gain(0.6, 0.2) - 2.0) > 1e-15 ||
            std::abs(expected_gain(0.2, 0.6) - 1.0) > 1e-15) {
            pass = false;
            detail += "betting piecewise formula failed; ";
        }
    }

    report(9, "property suites", pass, timer.elapsed(), detail);
}

// ---------------------------------------------------------------------------
// 10. conditional EPL goldens
// ---------------------------------------------------------------------------
const double kEplMerits[20] = {0.7325, -0.0575, -0.635,  0.165,  0.585,   -0.07, -0.2225,
                               -0.505, -0.4325, -0.49,   -0.3225, 0.54,   1.16,  0.43,
                               0.805,  -0.6175, -0.5825,  0.195,  -0.095, -0.5825};

void criterion10() {
    const char* env = std::getenv("PAIRCOMP_EPL_CSV");
    std::string path = env != nullptr ? env : "data/epl_2022-23_xg.csv";
    if (!std::filesystem::exists(path)) {
        report_skip(10, "EPL goldens", "data set not present (set PAIRCOMP_EPL_CSV)");
        return;
    }
    Timer timer;
    bool pass = true;
    std::string detail;
    try {
        const ComparisonData data = io::read_long_csv_file(path);
        if (data.item_count() != 20) throw data_error("expected 20 teams");
        const BasisPair b = build_bases(20);

        SelectionConfig config;
        config.alpha_components = 0.10;
        config.correction = Correction::bonferroni_fwer;
        const SelectionResult sel = ftbs_screened(data, b, SelectionMethod::fsr, config);
        const std::vector<Triad> want = {{1, 4, 18}};  // teams (2,5,19)
        if (sel.triads != want) {
            pass = false;
            detail += "selected model is not the (2,5,19) triad; ";
        }
        const FittedModel fit = fit_intermediate(data, b, want);
        pass &= close(fit.gamma(0), 1.18, 0.01, "gamma", detail);
        for (int i = 0; i < 20; ++i) {
            if (std::abs(fit.mu(i) - kEplMerits[i]) > 0.005) {
                pass = false;
                detail += "merit mismatch at team " + std::to_string(i + 1) + "; ";
            }
        }
        const FittedModel reduced = fit_reduced(data, b);
        const double sigma = std::sqrt(sigma2_hat(data).value);
        const BettingReport bet = total_win(reduced.nu, fit.nu, sigma);
        pass &= close(bet.win(b.pair_map.row(1, 4)), 2.67, 0.02, "Win(2,5)", detail);
        pass &= close(bet.win(b.pair_map.row(1, 18)), 0.93, 0.02, "Win(2,19)", detail);
        pass &= close(bet.win(b.pair_map.row(4, 18)), 0.23, 0.02, "Win(5,19)", detail);
        pass &= close(bet.total_win, 3.83, 0.02, "TotalWin", detail);
    } catch (const std::exception& e) {
        pass = false;
        detail += e.what();
    }
    report(10, "EPL goldens", pass, timer.elapsed(), detail);
}

}  // namespace

int main() {
    std::printf("acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();

    const Timer study_timer;
    const StudyBank bank = run_all_studies();
    const double study_seconds = study_timer.elapsed();
    criterion5(bank, study_seconds);
    criterion6(bank);
    criterion7(bank);
    criterion8(bank);

    criterion9();
    criterion10();

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
