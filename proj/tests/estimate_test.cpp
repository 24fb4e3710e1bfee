#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "paircomp/estimate.hpp"
#include "paircomp/linalg.hpp"
#include "paircomp/rng.hpp"
#include "test_util.hpp"

using namespace paircomp;
using testutil::exact_data;
using testutil::noisy_data;

TEST_CASE("ComparisonData: statistics and completeness") {
    const BasisPair b = build_bases(3);
    std::vector<std::vector<double>> samples = {{1.0, 3.0}, {-1.0}, {2.0, 0.0, 1.0}};
    const ComparisonData data(3, samples);
    CHECK(data.total_count() == 6);
    CHECK(data.counts() == Eigen::Vector3d(2, 1, 3));
    CHECK(data.pair_sums() == Eigen::Vector3d(4, -1, 3));
    CHECK(data.pair_means() == Eigen::Vector3d(2, -1, 1));
    // S_i = sum_j S_ij with sign adjustment
    CHECK(data.item_sums() == Eigen::Vector3d(3, -1, -2));
    CHECK((data.laplacian() * Eigen::Vector3d::Ones()).norm() == 0.0);

    samples[1].clear();
    CHECK_THROWS_AS(ComparisonData(3, samples), data_error);
}

TEST_CASE("fit_reduced: exact recovery on noiseless linear data") {
    const BasisPair b = build_bases(5);
    Eigen::VectorXd mu(5);
    mu << 2, 1, 0, -1, -2;
    const ComparisonData data = exact_data(b.linear_basis * mu, 5, 3);
    const FittedModel m = fit_reduced(data, b);
    CHECK((m.mu - mu).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(m.triads.empty());
    CHECK((m.nu - b.linear_basis * mu).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_reduced: complete- and path-graph merits of the K=4 example") {
    const BasisPair b = build_bases(4);
    Eigen::VectorXd nu(6);
    nu << -2, 0, 2, 0, 2, 0;

    const FittedModel complete = fit_reduced(exact_data(nu, 4, 2), b);
    Eigen::VectorXd expect_complete(4);
    expect_complete << 0, 1, 0, -1;
    CHECK((complete.mu - expect_complete).cwiseAbs().maxCoeff() < 1e-9);

    // heavy path edges {01,12,23}, single observations elsewhere
    const int m = 100000;
    std::vector<std::vector<double>> samples(6);
    for (int row = 0; row < 6; ++row) {
        const Pair p = b.pair_map.pair(row);
        const bool on_path = (p.j == p.i + 1);
        samples[static_cast<std::size_t>(row)]
            .assign(on_path ? static_cast<std::size_t>(m) : 1, nu(row));
    }
    const FittedModel path = fit_reduced(ComparisonData(4, std::move(samples)), b);
    Eigen::VectorXd expect_path(4);
    expect_path << -1.5, 0.5, 0.5, 0.5;
    CHECK((path.mu - expect_path).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("fit_full: pair means, invariance under duplication") {
    const BasisPair b = build_bases(4);
    Eigen::VectorXd nu(6);
    nu << 0.3, -1.2, 0.8, 0.1, -0.4, 2.0;
    CHECK(fit_full(exact_data(nu, 4, 1)) == nu);
    CHECK((fit_full(exact_data(nu, 4, 7)) - nu).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("fit_full: sampling variance is sigma^2 / n_ij") {
    const int reps = 10000, m = 4;
    const BasisPair b = build_bases(3);
    const Eigen::VectorXd nu = Eigen::VectorXd::Zero(3);
    auto eng = make_engine(2024);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3), sumsq = Eigen::VectorXd::Zero(3);
    for (int r = 0; r < reps; ++r) {
        const Eigen::VectorXd est = fit_full(noisy_data(nu, 3, m, 1.0, eng));
        sum += est;
        sumsq += est.cwiseProduct(est);
    }
    const Eigen::VectorXd var = sumsq / reps - (sum / reps).cwiseProduct(sum / reps);
    for (int row = 0; row < 3; ++row) {
        CHECK(var(row) == doctest::Approx(1.0 / m).epsilon(0.10));
    }
}

TEST_CASE("fit_joint_minnorm: worked K=5 example with spread-out gamma") {
    const BasisPair b = build_bases(5);
    Eigen::VectorXd mu(5);
    mu << 2, 1, 0, -1, -2;
    const Eigen::VectorXd nu = b.linear_basis * mu + testutil::triad_col(b, 0, 1, 2);
    const auto [mu_hat, gamma_hat] = fit_joint_minnorm(exact_data(nu, 5, 4), b);

    Eigen::VectorXd expected(10);
    expected << 0.6, 0.2, 0.2, -0.2, -0.2, 0, 0.2, 0.2, 0, 0;
    CHECK((gamma_hat - expected).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(gamma_hat.norm() == doctest::Approx(std::sqrt(0.6)).epsilon(1e-9));
    CHECK((b.linear_basis * mu_hat + b.cyclic_basis * gamma_hat - nu).cwiseAbs().maxCoeff() <
          1e-9);
}

TEST_CASE("fit_joint_minnorm: linear data gives zero gamma") {
    const BasisPair b = build_bases(4);
    Eigen::VectorXd mu(4);
    mu << 1.5, 0.5, -0.5, -1.5;
    const auto [mu_hat, gamma_hat] = fit_joint_minnorm(exact_data(b.linear_basis * mu, 4, 2), b);
    CHECK(gamma_hat.cwiseAbs().maxCoeff() < 1e-10);
    CHECK((mu_hat - mu).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit_joint_minnorm agrees with a dense min-norm solve of the normal equations") {
    // independent oracle: minimum-norm solution of the stacked normal equations
    // via pseudoinverse of the full Gram matrix
    const BasisPair b = build_bases(5);
    auto eng = make_engine(77);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd nu(b.pair_map.size());
    for (Eigen::Index r = 0; r < nu.size(); ++r) nu(r) = normal(eng);
    const ComparisonData data = noisy_data(nu, 5, 3, 0.5, eng);

    Eigen::MatrixXd design(b.pair_map.size(), 5 + b.triad_map.size());
    design << b.linear_basis, b.cyclic_basis;
    const Eigen::MatrixXd gram = design.transpose() * data.counts().asDiagonal() * design;
    const Eigen::VectorXd rhs = design.transpose() * data.pair_sums();
    const Eigen::VectorXd theta = linalg::pseudo_inverse(gram) * rhs;

    const auto [mu_hat, gamma_hat] = fit_joint_minnorm(data, b);
    CHECK((mu_hat - theta.head(5)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((gamma_hat - theta.tail(b.triad_map.size())).cwiseAbs().maxCoeff() < 1e-8);

    // reconstruction identity: B mu + C gamma equals the full-model LSE
    const Eigen::VectorXd recon = b.linear_basis * mu_hat + b.cyclic_basis * gamma_hat;
    CHECK((recon - fit_full(data)).cwiseAbs().maxCoeff() <
          1e-8 * (1.0 + fit_full(data).cwiseAbs().maxCoeff()));
}

TEST_CASE("fit_intermediate: exact recovery, degenerate cases, flags") {
    const BasisPair b = build_bases(6);
    Eigen::VectorXd mu(6);
    mu << 1, 2, 0, -1, 0, -2;
    Eigen::VectorXd gamma(2);
    gamma << 1.0, -1.0;
    const std::vector<Triad> triads = testutil::scenario1_triads();
    const Eigen::VectorXd nu = b.linear_basis * mu + testutil::triad_col(b, 0, 1, 2) * gamma(0) +
                               testutil::triad_col(b, 0, 3, 4) * gamma(1);
    const ComparisonData data = exact_data(nu, 6, 2);

    const FittedModel m = fit_intermediate(data, b, triads);
    CHECK((m.mu - mu).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((m.gamma - gamma).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((m.nu - nu).cwiseAbs().maxCoeff() < 1e-9);
    CHECK_FALSE(m.rank_deficient);
    CHECK(std::abs(m.mu.sum()) <= 1e-9 * m.mu.cwiseAbs().maxCoeff());

    const FittedModel empty = fit_intermediate(data, b, {});
    const FittedModel reduced = fit_reduced(data, b);
    CHECK((empty.mu - reduced.mu).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((empty.nu - reduced.nu).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(fit_intermediate(data, b, {{0, 1, 2}, {0, 1, 2}}), config_error);

    // c_(1,2,3) = c_(0,1,2) + c_(0,2,3) - c_(0,1,3): rank-deficient design
    const FittedModel deficient =
        fit_intermediate(data, b, {{0, 1, 2}, {0, 2, 3}, {0, 1, 3}, {1, 2, 3}});
    CHECK(deficient.rank_deficient);
}

TEST_CASE("fit_intermediate: unbiasedness over Monte-Carlo replications") {
    const int reps = 10000, m = 20;
    const BasisPair b = build_bases(6);
    const Eigen::VectorXd mu = Eigen::VectorXd::Zero(6);
    const Eigen::VectorXd nu = testutil::scenario1_cyclic(b);
    const std::vector<Triad> triads = testutil::scenario1_triads();
    Eigen::VectorXd true_gamma(2);
    true_gamma << 1.0, -1.0;

    auto eng = make_engine(555);
    Eigen::VectorXd mu_sum = Eigen::VectorXd::Zero(6), mu_ss = Eigen::VectorXd::Zero(6);
    Eigen::VectorXd g_sum = Eigen::VectorXd::Zero(2), g_ss = Eigen::VectorXd::Zero(2);
    for (int r = 0; r < reps; ++r) {
        const FittedModel f = fit_intermediate(noisy_data(nu, 6, m, 1.0, eng), b, triads);
        mu_sum += f.mu;
        mu_ss += f.mu.cwiseProduct(f.mu);
        g_sum += f.gamma;
        g_ss += f.gamma.cwiseProduct(f.gamma);
    }
    for (int i = 0; i < 6; ++i) {
        const double mean = mu_sum(i) / reps;
        const double sd = std::sqrt(mu_ss(i) / reps - mean * mean);
        CHECK(std::abs(mean - mu(i)) < 3.0 * sd / std::sqrt(static_cast<double>(reps)));
    }
    for (int i = 0; i < 2; ++i) {
        const double mean = g_sum(i) / reps;
        const double sd = std::sqrt(g_ss(i) / reps - mean * mean);
        CHECK(std::abs(mean - true_gamma(i)) < 3.0 * sd / std::sqrt(static_cast<double>(reps)));
    }
}

TEST_CASE("sigma2_hat: exact values and degeneracy") {
    const BasisPair b = build_bases(4);
    Eigen::VectorXd nu(6);
    nu << 1, 0, -1, 2, 0, 1;

    CHECK(sigma2_hat(exact_data(nu, 4, 3)).value == doctest::Approx(0.0));

    // two observations per pair at nu -/+ 1: residuals all +-1
    std::vector<std::vector<double>> samples(6);
    for (int row = 0; row < 6; ++row) {
        samples[static_cast<std::size_t>(row)] = {nu(row) - 1.0, nu(row) + 1.0};
    }
    const Sigma2Estimate mid = sigma2_hat(ComparisonData(4, std::move(samples)));
    CHECK(mid.value == doctest::Approx(1.0));
    CHECK_FALSE(mid.degenerate);

    const Sigma2Estimate single = sigma2_hat(exact_data(nu, 4, 1));
    CHECK(single.value == 0.0);
    CHECK(single.degenerate);
}

TEST_CASE("sigma2_hat: consistency under unit-variance noise") {
    const BasisPair b = build_bases(6);
    auto eng = make_engine(31);
    const Eigen::VectorXd nu = testutil::scenario2_cyclic(b);
    double mean = 0.0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        const double s2 = sigma2_hat(noisy_data(nu, 6, 50, 1.0, eng)).value;
        CHECK(std::abs(s2 - 1.0) < 0.25);  // ~5 sd of a single estimate
        mean += s2;
    }
    CHECK(std::abs(mean / reps - 1.0) < 0.1);
}

TEST_CASE("residual sum of squares is monotone as triads are added") {
    const BasisPair b = build_bases(6);
    auto eng = make_engine(88);
    const Eigen::VectorXd nu = testutil::scenario2_cyclic(b) + b.linear_basis * Eigen::VectorXd::Random(6);
    const ComparisonData data = noisy_data(nu, 6, 10, 1.0, eng);

    std::vector<Triad> triads;
    double prev = std::numeric_limits<double>::infinity();
    const std::vector<Triad> order = {{0, 3, 4}, {1, 4, 5}, {2, 3, 5}, {0, 1, 2}};
    for (std::size_t t = 0; t <= order.size(); ++t) {
        const FittedModel f = fit_intermediate(data, b, triads);
        const Eigen::VectorXd resid = data.pair_means() - f.nu;
        double rss = 0.0;
        for (int row = 0; row < b.pair_map.size(); ++row) {
            rss += data.counts()(row) * resid(row) * resid(row);
        }
        CHECK(rss <= prev + 1e-9);
        prev = rss;
        if (t < order.size()) triads.push_back(order[t]);
    }
}

TEST_CASE("standardised estimates look normal at large m") {
    // smoke check of asymptotic normality: skewness and excess kurtosis of the
    // standardised coordinates stay near zero
    const int reps = 10000, m = 200;
    const BasisPair b = build_bases(6);
    const Eigen::VectorXd nu = testutil::scenario1_cyclic(b);
    const std::vector<Triad> triads = testutil::scenario1_triads();

    auto eng = make_engine(909);
    std::vector<Eigen::VectorXd> draws;
    draws.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        const FittedModel f = fit_intermediate(noisy_data(nu, 6, m, 1.0, eng), b, triads);
        Eigen::VectorXd theta(8);
        theta << f.mu, f.gamma;
        draws.push_back(theta);
    }
    for (int coord = 0; coord < 8; ++coord) {
        double mean = 0.0;
        for (const auto& d : draws) mean += d(coord);
        mean /= reps;
        double m2 = 0, m3 = 0, m4 = 0;
        for (const auto& d : draws) {
            const double c = d(coord) - mean;
            m2 += c * c;
            m3 += c * c * c;
            m4 += c * c * c * c;
        }
        m2 /= reps;
        m3 /= reps;
        m4 /= reps;
        const double skew = m3 / std::pow(m2, 1.5);
        const double kurt = m4 / (m2 * m2) - 3.0;
        CHECK(std::abs(skew) < 0.1);
        CHECK(std::abs(kurt) < 0.2);
    }
}
