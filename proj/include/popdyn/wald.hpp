#pragma once

#include <functional>

#include "popdyn/trajectory.hpp"

namespace popdyn {

// Central finite-difference Hessian with per-coordinate relative step.
Mat fd_hessian(const std::function<double(const Vec&)>& fn, const Vec& x,
               double rel_step = 1e-4);

struct WaldInterval {
    Vec se;
    Vec low;   // 95% interval bounds
    Vec high;
};

// Observed-information intervals: inverts the Hessian of the negative
// log-likelihood at the optimum. Throws NotPositiveDefinite when the
// curvature is not usable.
WaldInterval wald_interval(const std::function<double(const Vec&)>& negloglik,
                           const Vec& mle, double rel_step = 1e-4);

}  // namespace popdyn
