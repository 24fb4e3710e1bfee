#include "paircomp/betting.hpp"

#include "paircomp/inference.hpp"

namespace paircomp {

double win_probability(double nu_ij, double sigma) {
    if (sigma <= 0.0) throw config_error("win_probability: sigma must be positive");
    return 1.0 - normal_cdf(nu_ij / sigma);
}

double expected_gain(double tau, double omega) {
    if (tau <= 0.0 || tau >= 1.0 || omega <= 0.0 || omega >= 1.0) {
        throw config_error("expected_gain: probabilities must lie strictly inside (0,1)");
    }
    if (tau > omega) return (tau - omega) / omega;
    if (tau < omega) return (omega - tau) / (1.0 - omega);
    return 0.0;
}

BettingReport total_win(const Eigen::VectorXd& nu_transitive, const Eigen::VectorXd& nu_selected,
                        double sigma) {
    if (nu_transitive.size() != nu_selected.size()) {
        throw config_error("total_win: profile lengths differ");
    }
    BettingReport rep;
    const Eigen::Index p = nu_transitive.size();
    rep.omega.resize(p);
    rep.tau.resize(p);
    rep.win.resize(p);
    for (Eigen::Index r = 0; r < p; ++r) {
        rep.omega(r) = win_probability(nu_transitive(r), sigma);
        rep.tau(r) = win_probability(nu_selected(r), sigma);
        rep.win(r) = expected_gain(rep.tau(r), rep.omega(r));
        rep.total_win += rep.win(r);
    }
    return rep;
}

}  // namespace paircomp
