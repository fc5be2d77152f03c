#include "popdyn/fit.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "popdyn/nelder_mead.hpp"
#include "popdyn/wald.hpp"

namespace popdyn {

JgdlaFit fit_jgdla_mle(const ReactionNetwork& net,
                       const ParamVector& theta_init, const Vec& x0,
                       double t_end, double h, const Trajectory& obs,
                       long long N) {
    obs.check();
    const int p = theta_init.size();
    const auto loglik_at = [&](const ParamVector& th) {
        return jgdla_loglik(
            jgdla_build(net, th, x0, t_end, h, obs.times, N), obs);
    };

    const auto negloglik_log = [&](const Vec& w) -> double {
        std::vector<double> vals(p);
        for (int j = 0; j < p; ++j) {
            vals[j] = std::exp(w[j]);
            if (!std::isfinite(vals[j]) || vals[j] <= 0.0)
                return std::numeric_limits<double>::infinity();
        }
        try {
            return -loglik_at(theta_init.with_values(vals));
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Vec w0(p);
    for (int j = 0; j < p; ++j) w0[j] = std::log(theta_init[j]);
    const NelderMeadResult best = nelder_mead(negloglik_log, w0);

    JgdlaFit fit;
    std::vector<double> vals(p);
    for (int j = 0; j < p; ++j) vals[j] = std::exp(best.x[j]);
    fit.theta = theta_init.with_values(vals);
    fit.loglik = -best.value;
    fit.converged = best.converged;
    fit.dist = jgdla_build(net, fit.theta, x0, t_end, h, obs.times, N);

    Vec mle(p);
    for (int j = 0; j < p; ++j) mle[j] = fit.theta[j];
    const auto negloglik_nat = [&](const Vec& v) -> double {
        std::vector<double> nv(p);
        for (int j = 0; j < p; ++j) {
            if (!(v[j] > 0.0)) return std::numeric_limits<double>::infinity();
            nv[j] = v[j];
        }
        try {
            return -loglik_at(theta_init.with_values(nv));
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const WaldInterval w = wald_interval(negloglik_nat, mle);
    fit.ci_low = w.low;
    fit.ci_high = w.high;
    return fit;
}

}  // namespace popdyn
