#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "popdyn/model.hpp"
#include "popdyn/mvn.hpp"
#include "popdyn/ode.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

// Joint Gaussian law of the observed proportions at obs_times: mean is the
// stacked deterministic path, cov the 1/N fluctuation covariance.
struct JgdlaDistribution {
    std::vector<double> obs_times;
    std::vector<std::string> class_names;
    Vec mean;                      // stacked, d entries per time
    Mat cov;                       // dT x dT, symmetrized
    Mat chol;                      // lower factor of cov + jitter*I
    double jitter = 0.0;
    long long N = 0;
    std::vector<Mat> cov_y_blocks;  // Cov(Y(t_k)) per observation time
    std::vector<Mat> u_at_obs;      // fundamental matrix U(t_k) per time

    int dim() const { return cov_y_blocks.empty() ? 0 : static_cast<int>(cov_y_blocks.front().rows()); }
    int n_times() const { return static_cast<int>(obs_times.size()); }
};

// Covariance of the zero-mean fluctuation process Y at time t:
// entry (j,k) = sum_i \int_0^t a_ij(s) a_ik(s) lambda_i(X(s)) ds with
// a_i(s) = U^-1(s) R_i, trapezoid on the ODE grid.
Mat cov_y(const OdeSolution& ode, const ReactionNetwork& net,
          const ParamVector& theta, double t);

// Same integral reported at several grid times from one cumulative pass;
// matches per-time cov_y calls bit for bit.
std::vector<Mat> cov_y_at(const OdeSolution& ode, const ReactionNetwork& net,
                          const ParamVector& theta,
                          const std::vector<double>& times);

JgdlaDistribution assemble_sigma(const OdeSolution& ode,
                                 const ReactionNetwork& net,
                                 const ParamVector& theta,
                                 const std::vector<double>& obs_times,
                                 long long N);

// Runs the whole pipeline: deterministic path, fundamental matrix,
// fluctuation covariances, assembly, Cholesky.
JgdlaDistribution jgdla_build(const ReactionNetwork& net,
                              const ParamVector& theta, const Vec& x0,
                              double t_end, double h,
                              const std::vector<double>& obs_times,
                              long long N);

// Joint Gaussian log density of the observed trajectory.
double jgdla_loglik(const JgdlaDistribution& dist, const Trajectory& obs);

struct JgdlaPrediction {
    std::vector<double> pred_times;
    Vec mean;  // stacked, d entries per time
    Mat cov;
};

// Conditions a joint distribution on observations at a strict subset of its
// times; the remaining times form the prediction block. Pure linear algebra,
// so it also works on deserialized artifacts.
JgdlaPrediction condition_on_observations(const JgdlaDistribution& joint,
                                          const Trajectory& obs);

// Conditional law of the states at pred_times given the observations,
// from the joint distribution over the union of times.
JgdlaPrediction predict_conditional(const OdeSolution& ode,
                                    const ReactionNetwork& net,
                                    const ParamVector& theta, long long N,
                                    const Trajectory& obs,
                                    const std::vector<double>& pred_times);

// Columns are draws mean + L z with z ~ N(0, I); z filled column-major.
Mat sample_joint(const JgdlaDistribution& dist, int n_samples,
                 std::uint64_t seed);
// Test hook: same transform with caller-supplied z (dT x n_samples).
Mat sample_joint_with_z(const JgdlaDistribution& dist, const Mat& z);

// JSON artifact round-trip (times, mean, covariance row-major, jitter, N).
std::string jgdla_serialize(const JgdlaDistribution& dist);
JgdlaDistribution jgdla_deserialize(const std::string& text);

}  // namespace popdyn
