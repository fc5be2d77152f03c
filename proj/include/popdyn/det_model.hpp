#pragma once

#include "popdyn/model.hpp"
#include "popdyn/ode.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

// Gaussian observation-error likelihood around the deterministic path:
// sum over observation times of log N(x_obs(t); X(t), sigma^2 I).
double det_model_loglik(const ReactionNetwork& net, const ParamVector& theta,
                        double sigma, const Vec& x0, const Trajectory& obs,
                        double h);

struct DetFit {
    ParamVector theta;
    double sigma = 0.0;
    double loglik = 0.0;
    Vec ci_low;   // 95% Wald intervals for theta, natural scale
    Vec ci_high;
    bool converged = false;
};

// Maximizes det_model_loglik over (theta, sigma) by Nelder-Mead on the log
// scale; Wald intervals from a finite-difference Hessian at the optimum.
DetFit fit_det_model(const ReactionNetwork& net, const ParamVector& theta_init,
                     const Vec& x0, const Trajectory& obs, double h);

}  // namespace popdyn
