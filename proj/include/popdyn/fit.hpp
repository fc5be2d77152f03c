#pragma once

#include "popdyn/jgdla.hpp"
#include "popdyn/model.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

struct JgdlaFit {
    ParamVector theta;
    double loglik = 0.0;
    Vec ci_low;   // 95% Wald intervals, natural scale
    Vec ci_high;
    bool converged = false;
    JgdlaDistribution dist;  // joint at the fitted parameters, obs times
};

// Maximum likelihood under the joint Gaussian approximation: Nelder-Mead on
// log theta, observed-information Wald intervals on the natural scale.
JgdlaFit fit_jgdla_mle(const ReactionNetwork& net,
                       const ParamVector& theta_init, const Vec& x0,
                       double t_end, double h, const Trajectory& obs,
                       long long N);

}  // namespace popdyn
