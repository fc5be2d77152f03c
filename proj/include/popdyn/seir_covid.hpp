#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "popdyn/jgdla.hpp"
#include "popdyn/mcmc.hpp"
#include "popdyn/model.hpp"
#include "popdyn/prior.hpp"
#include "popdyn/step_function.hpp"

namespace popdyn {

struct BinomialObservation {
    double t = 0.0;
    long long n = 0;  // tests administered
    long long y = 0;  // positive tests

    void check() const;
};

// Daily cruise-ship testing record; days without testing carry no counts.
struct CovidRow {
    int day = 0;
    bool has_obs = false;
    long long n = 0;
    long long y = 0;
    long long on_ship = 0;
};

inline constexpr long long kCovidPopulation = 3711;

// The 16-day Diamond Princess record embedded as the reference dataset.
const std::vector<CovidRow>& diamond_princess_rows();

// The 14 observed (t, n, y) triples, skipping no-test days.
std::vector<BinomialObservation> covid_observations();

// Piecewise-constant disembarkment hazard: on each one-day interval ending
// at a drop in the on-ship count, the rate -log(next/prev) sheds exactly the
// observed fraction from the susceptible class; zero elsewhere.
StepFunction covid_mu_s();

struct McBinomStats {
    long long clamp_events = 0;     // sampled proportions pushed back into (0,1)
    bool degenerate = false;        // every sample clamped against the data
};

// Monte Carlo marginal log-likelihood of binomial counts against latent SEIR
// states: log of the average over joint Gaussian draws of the per-draw
// binomial product, via log-sum-exp. Sampled positive-test probabilities
// P = I/(S+E+I) are clamped to [1e-9, 1-1e-9]. When every draw clamps in a
// way that contradicts the data, records the fact and returns a large
// negative value instead of -inf.
double mc_binomial_loglik(const JgdlaDistribution& dist,
                          const std::vector<BinomialObservation>& obs, int L,
                          std::uint64_t seed, McBinomStats* stats = nullptr);
// Test hook: caller supplies the standard-normal draws (dT x L).
double mc_binomial_loglik_with_z(const JgdlaDistribution& dist,
                                 const std::vector<BinomialObservation>& obs,
                                 const Mat& z, McBinomStats* stats = nullptr);

struct SeirSamplerConfig {
    MhConfig mh;                    // proposal_sd may be left empty
    int L = 1000;                   // Monte Carlo draws per evaluation
    double h = 0.01;                // ODE step
    std::uint64_t mc_seed = 77;     // master seed for per-iteration substreams
    double theta_log_sd = 0.1;      // step on log beta, log alpha, log gamma
    double init_sd = 0.02;          // step on S(0), I(0)
    // Start point (beta, alpha, gamma, S0, I0); empty uses a broad default.
    Vec start;
};

struct SeirChainResult {
    PosteriorChain chain;           // (beta, alpha, gamma, S0, I0), natural scale
    long long clamp_events = 0;     // summed over all target evaluations
    long long degenerate_evals = 0;
};

// All-at-once random walk over (log rates, initial proportions) with priors
// beta, alpha ~ N(0,15^2) on (0,inf); gamma ~ N(0,0.3^2) on (0,inf);
// S(0) ~ N(0,0.3^2) on (0,1); I(0) ~ N(0,0.1^2) on (0,1); S(0)+I(0) < 1 and
// E(0) = 1-S(0)-I(0). The likelihood is re-estimated with fresh draws every
// iteration; current and proposed points share the iteration's draw seed.
SeirChainResult seir_mh_sampler(const std::vector<BinomialObservation>& data,
                                const SeirSamplerConfig& cfg);

// Deterministic positive-test probability curve P(t) = I/(S+E+I) on a
// uniform reporting grid.
std::vector<std::pair<double, double>> seir_p_curve(const ParamVector& theta,
                                                    double s0, double i0,
                                                    double t_end, double h,
                                                    double report_dt);

}  // namespace popdyn
