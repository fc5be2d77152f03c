#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "popdyn/model.hpp"
#include "popdyn/rng.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

struct SimConfig {
    std::uint64_t seed = 0;
    double t_end = 0.0;
    // Snapshot grid (strictly increasing, within [0, t_end]). Empty: the
    // full event path (Gillespie) or every step time (Euler-Maruyama) is
    // recorded instead.
    std::vector<double> record_times;
    long long N = 0;

    void check() const;
};

// Exact event-driven simulation on counts N*x. At state x the total event
// rate is N * sum_i lambda_i(x); waiting times are exponential and reaction
// i fires with probability lambda_i / sum lambda. Snapshots report the state
// of the last event at or before each snapshot time (cadlag). Piecewise-
// constant time-varying rates are handled by resampling at breakpoints.
// Terminates at t_end or in an absorbing state (total rate 0).
Trajectory gillespie_path(const ReactionNetwork& net, const ParamVector& theta,
                          const Vec& x0, const SimConfig& cfg);

struct EmPathResult {
    Trajectory trajectory;
    // True when some state component left [0,1] at any step. States are kept
    // raw (no reflection or clamping); rates at such states floor at 0.
    bool exited_unit_interval = false;
};

struct EmPathOptions {
    // Turns the noise term off, leaving the first-order Euler ODE update.
    bool zero_diffusion = false;
};

// Euler-Maruyama path: X(t+dt) = X(t) + mu(X) dt + sqrt(dt) * (Q(X)/sqrt(N)) Z,
// Z ~ N(0, I_n). Throws NonFiniteRate if the state becomes non-finite.
EmPathResult em_path(const ReactionNetwork& net, const ParamVector& theta,
                     const Vec& x0, double dt, const SimConfig& cfg,
                     const EmPathOptions& opts = {});

enum class SimMethod { gillespie, euler_maruyama };

struct EnsembleOptions {
    SimMethod method = SimMethod::gillespie;
    double em_dt = 0.01;
    // Explicit per-path seeds; default derives path p's seed from cfg.seed
    // via derive_seed(cfg.seed, p).
    std::optional<std::vector<std::uint64_t>> path_seeds;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<Vec> mean;
    std::vector<Mat> cov;  // unbiased sample covariance per record time
    int n_paths = 0;
};

// Runs n_paths independent paths (parallel when threads are available) and
// reduces mean/covariance per record time in path-index order, so results
// are deterministic. Path failures rethrow as EnsembleError with the index.
EnsembleStats ensemble(const ReactionNetwork& net, const ParamVector& theta,
                       const Vec& x0, const SimConfig& cfg, int n_paths,
                       const EnsembleOptions& opts = {});

}  // namespace popdyn
