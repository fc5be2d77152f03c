#include "popdyn/det_model.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "popdyn/nelder_mead.hpp"
#include "popdyn/wald.hpp"

namespace popdyn {

double det_model_loglik(const ReactionNetwork& net, const ParamVector& theta,
                        double sigma, const Vec& x0, const Trajectory& obs,
                        double h) {
    if (!(sigma > 0.0)) throw Error("det_model_loglik: sigma must be > 0");
    obs.check();
    const OdeSolution ode =
        solve_dagger(net, theta, x0, obs.times.back(), h);
    constexpr double log2pi = 1.8378770664093454836;
    double loglik = 0.0;
    for (std::size_t k = 0; k < obs.times.size(); ++k) {
        const Vec mean = ode.value_at(obs.times[k]);
        const Vec r = obs.states[k] - mean;
        const double d = static_cast<double>(r.size());
        loglik += -0.5 * d * (log2pi + 2.0 * std::log(sigma)) -
                  0.5 * r.squaredNorm() / (sigma * sigma);
    }
    return loglik;
}

DetFit fit_det_model(const ReactionNetwork& net, const ParamVector& theta_init,
                     const Vec& x0, const Trajectory& obs, double h) {
    const int p = theta_init.size();

    const auto theta_of = [&](const Vec& w) {
        std::vector<double> vals(p);
        for (int j = 0; j < p; ++j) vals[j] = std::exp(w[j]);
        return theta_init.with_values(vals);
    };
    // Log-scale coordinates (log theta..., log sigma) keep positivity
    // without constraints.
    const auto negloglik_log = [&](const Vec& w) -> double {
        try {
            return -det_model_loglik(net, theta_of(w), std::exp(w[p]), x0, obs, h);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Vec w0(p + 1);
    for (int j = 0; j < p; ++j) w0[j] = std::log(theta_init[j]);
    w0[p] = std::log(0.05);
    const NelderMeadResult best = nelder_mead(negloglik_log, w0);

    DetFit fit;
    fit.theta = theta_of(best.x);
    fit.sigma = std::exp(best.x[p]);
    fit.loglik = -best.value;
    fit.converged = best.converged;

    // Wald intervals on the natural scale for theta, profiling nothing:
    // curvature of the joint (theta, sigma) negative log-likelihood.
    Vec mle(p + 1);
    for (int j = 0; j < p; ++j) mle[j] = fit.theta[j];
    mle[p] = fit.sigma;
    const auto negloglik_nat = [&](const Vec& v) -> double {
        std::vector<double> vals(p);
        for (int j = 0; j < p; ++j) {
            if (!(v[j] > 0.0)) return std::numeric_limits<double>::infinity();
            vals[j] = v[j];
        }
        if (!(v[p] > 0.0)) return std::numeric_limits<double>::infinity();
        try {
            return -det_model_loglik(net, theta_init.with_values(vals), v[p],
                                     x0, obs, h);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const WaldInterval w = wald_interval(negloglik_nat, mle);
    fit.ci_low = w.low.head(p);
    fit.ci_high = w.high.head(p);
    return fit;
}

}  // namespace popdyn
