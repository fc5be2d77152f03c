#pragma once

#include <functional>

#include "popdyn/trajectory.hpp"

namespace popdyn {

struct NelderMeadOptions {
    double reflect = 1.0;
    double expand = 2.0;
    double contract = 0.5;
    double shrink = 0.5;
    double diameter_tol = 1e-8;   // max vertex distance from the best vertex
    double spread_tol = 1e-10;    // worst minus best function value
    int max_iterations = 5000;
    double initial_step = 0.1;    // per-coordinate offset for the start simplex
    int restarts = 1;             // re-run from the best point after converging
};

struct NelderMeadResult {
    Vec x;
    double value = 0.0;
    int iterations = 0;      // summed over restarts
    bool converged = false;  // false means the iteration cap was hit
};

// Minimizes fn by the downhill simplex method. Non-finite fn values are
// treated as +infinity so the simplex backs away from them.
NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& fn,
                             const Vec& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace popdyn
