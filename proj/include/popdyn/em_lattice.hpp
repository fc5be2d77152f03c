#pragma once

#include <vector>

#include "popdyn/mcmc.hpp"
#include "popdyn/model.hpp"
#include "popdyn/prior.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

enum class EmVariant { full, independent };

// One-step Gaussian transition density of the discretized diffusion:
// x_to ~ N(x_from + drift*dt, dt*Sigma(x_from)/N). The independent variant
// zeroes the off-diagonal covariance entries. A zero diagonal entry before
// regularization signals a frozen class and raises DegenerateCovariance;
// otherwise a 1e-12 diagonal floor is applied when any rate vanishes.
double em_transition_logdensity(const ReactionNetwork& net,
                                const ParamVector& theta, const Vec& x_from,
                                const Vec& x_to, double dt, long long N,
                                EmVariant variant, double t_from = 0.0);

// Uniform time lattice carrying observed states at fixed indices and current
// latent values elsewhere.
struct EmLattice {
    double dt = 1.0;
    std::vector<double> times;
    std::vector<bool> observed;
    std::vector<Vec> values;

    static EmLattice from_observations(const Trajectory& obs, double t_end,
                                       double dt);

    int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
    int n_lattice() const { return static_cast<int>(times.size()); }
    int n_latent_times() const;
    int n_latent() const { return n_latent_times() * dim(); }
    std::vector<int> latent_time_indices() const;

    // Latent packing order: lattice index ascending, class index within.
    Vec pack_latent() const;
    void set_latent(const Vec& packed);
};

// Sum of one-step transition densities over consecutive lattice pairs.
double lattice_loglik(const ReactionNetwork& net, const ParamVector& theta,
                      const EmLattice& lattice, long long N, EmVariant variant);

struct EmSamplerConfig {
    MhConfig mh;                  // proposal_sd may be left empty
    double theta_log_sd = 0.02;   // default step on log theta
    double latent_sd = 0.005;     // default step on latent proportions
    EmVariant variant = EmVariant::full;
};

// All-at-once random-walk Metropolis over (log theta, latent states) against
// lattice likelihood times the given priors on theta (natural scale). Chain
// samples report theta on the natural scale followed by the packed latent.
// theta_init supplies the parameter names, ordering, and start values.
PosteriorChain em_mh_sampler(const ReactionNetwork& net, const Trajectory& obs,
                             long long N, double dt,
                             const ParamVector& theta_init,
                             const std::vector<Prior>& theta_priors,
                             const EmSamplerConfig& cfg);

// Rebuilds the lattice layout the sampler used (for interpreting latent
// coordinates in a chain).
EmLattice em_sampler_lattice(const ReactionNetwork& net, const Trajectory& obs,
                             double dt);

// Posterior-mean absolute error of the infected class at pred_times:
// mean over samples of |I_sample - I_truth|, averaged over pred_times.
double em_mape(const PosteriorChain& chain, const EmLattice& layout,
               int infected_class, const Trajectory& truth,
               const std::vector<double>& pred_times);

}  // namespace popdyn
