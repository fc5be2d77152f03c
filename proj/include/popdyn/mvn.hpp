#pragma once

#include "popdyn/errors.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

// Lower Cholesky factor plus the diagonal jitter that was needed to get it.
struct CholResult {
    Mat L;
    double jitter = 0.0;  // 0 when the plain factorization succeeded
};

// Attempts a plain LLT first; on failure adds jitter*I with jitter escalating
// from `initial` by factors of 10 up to `ceiling` before giving up.
CholResult chol_with_jitter(const Mat& sigma, double initial = 1e-12,
                            double ceiling = 1e-8);

// Log density of N(mean, L L') evaluated at x, using triangular solves.
double mvn_logpdf(const Vec& x, const Vec& mean, const Mat& L);

// Conditional N(mean_a + C_ab C_bb^-1 (x_b - mean_b), C_aa - C_ab C_bb^-1 C_ba)
// of the `keep` block given observed values at the `given` block.
struct ConditionalMvn {
    Vec mean;
    Mat cov;
};
ConditionalMvn mvn_condition(const Vec& mean, const Mat& cov,
                             const std::vector<int>& keep,
                             const std::vector<int>& given, const Vec& x_given);

}  // namespace popdyn
