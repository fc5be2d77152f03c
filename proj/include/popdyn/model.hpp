#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "popdyn/errors.hpp"
#include "popdyn/params.hpp"
#include "popdyn/step_function.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

using StoichVec = Eigen::VectorXi;
using RateFn = std::function<double(const Vec& x, const ParamVector& theta, double t)>;
using JacobianFn = std::function<Mat(const Vec& x, const ParamVector& theta, double t)>;

// A Markov population model: d tracked classes, n reactions. Reaction i
// moves the class-count vector by its stoichiometry vector and fires at rate
// lambda_i(x, theta, t), evaluated on proportions x in [0,1]^d. Immutable
// after construction; all operations are pure, so instances can be shared
// across threads freely.
class ReactionNetwork {
public:
    ReactionNetwork(std::vector<std::string> class_names,
                    std::vector<StoichVec> stoich,
                    std::vector<RateFn> rates,
                    std::optional<JacobianFn> jacobian = std::nullopt,
                    std::vector<double> rate_breakpoints = {});

    int dim() const { return d_; }
    int n_reactions() const { return n_; }
    const std::vector<std::string>& class_names() const { return class_names_; }
    const StoichVec& stoich(int i) const { return stoich_.at(i); }
    bool has_analytic_jacobian() const { return jacobian_.has_value(); }

    // Times at which some rate is discontinuous in t (piecewise-constant
    // time dependence). Exact simulation resamples across these.
    const std::vector<double>& rate_breakpoints() const { return rate_breakpoints_; }

    // All n rates at (x, theta, t). NaN/inf rates throw NonFiniteRate.
    // Negative values above -1e-12 are roundoff and clamp to 0; anything
    // more negative throws.
    Vec rates(const Vec& x, const ParamVector& theta, double t) const;

    // Rates with negatives floored at 0. Euler-Maruyama states may leave
    // [0,1], which makes rates legitimately negative; the diffusion needs
    // sqrt(lambda) so those floor to zero instead of erroring.
    Vec rates_floored(const Vec& x, const ParamVector& theta, double t) const;

    // F(x) = sum_i R_i lambda_i(x).
    Vec drift(const Vec& x, const ParamVector& theta, double t) const;

    // d x n matrix Q with column i = R_i sqrt(lambda_i(x)); Q Q' is the
    // state-dependent covariance Sigma_theta(x) = sum_i R_i R_i' lambda_i.
    Mat diffusion_factor(const Vec& x, const ParamVector& theta, double t) const;

    // Sigma_theta(x) assembled directly from the stoichiometry sum, with
    // rates floored at 0 (serves Euler-Maruyama transitions off-simplex).
    Mat covariance(const Vec& x, const ParamVector& theta, double t) const;

    // dF/dx: the analytic matrix when one was supplied, otherwise central
    // finite differences of drift() with step 1e-6.
    Mat jacobian(const Vec& x, const ParamVector& theta, double t) const;
    Mat jacobian_fd(const Vec& x, const ParamVector& theta, double t) const;

private:
    int d_ = 0;
    int n_ = 0;
    std::vector<std::string> class_names_;
    std::vector<StoichVec> stoich_;
    std::vector<RateFn> rates_;
    std::optional<JacobianFn> jacobian_;
    std::vector<double> rate_breakpoints_;
};

// SIR with a closed population, classes (S, I) and theta = (beta, gamma):
// infection R_1 = (-1,1)' at rate beta*S*I, recovery R_2 = (0,-1)' at rate
// gamma*I. The recovered class is implicit (R = 1 - S - I).
ReactionNetwork build_sir();

// SEIR with susceptible removal, classes (S, E, I) and theta =
// (beta, alpha, gamma): exposure (-1,1,0)' at beta*I*S, disembarkment
// (-1,0,0)' at mu_s(t)*S, onset (0,-1,1)' at alpha*E, removal (0,0,-1)' at
// gamma*I. mu_s is an externally supplied piecewise-constant hazard.
ReactionNetwork build_seir(StepFunction mu_s);

// Mass-action network: lambda_i = theta_{param_index[i]} * prod_j x_j^e_ij.
// This is the shape custom model files can express.
ReactionNetwork build_mass_action(std::vector<std::string> class_names,
                                  std::vector<StoichVec> stoich,
                                  std::vector<int> param_index,
                                  std::vector<Eigen::VectorXi> exponents);

}  // namespace popdyn
