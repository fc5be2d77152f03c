#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "popdyn/trajectory.hpp"

namespace popdyn {

// Log-posterior evaluated at a point. The iteration index lets targets with
// internal Monte Carlo noise derive a fresh substream per MH step.
using LogTarget = std::function<double(const Vec&, std::uint64_t)>;

struct MhConfig {
    std::uint64_t seed = 1;
    int iterations = 30000;   // post-tuning steps, including burn-in
    int burn_in = 10000;
    Vec proposal_sd;          // one entry per coordinate
    bool tune = true;         // pilot-adjust proposal_sd into the target band
    int tune_block = 200;
    int tune_rounds = 25;
    double target_low = 0.15;
    double target_high = 0.40;
    // Re-evaluate the current point each step with the iteration's substream.
    // Required for targets whose value is a fresh Monte Carlo estimate.
    bool refresh_current = false;
};

struct PosteriorChain {
    std::vector<std::string> names;   // coordinate labels, natural scale
    std::vector<Vec> samples;         // retained iterations only
    std::vector<double> logposts;     // aligned with samples
    std::vector<std::uint8_t> accepts;  // one flag per post-tuning step
    double acceptance_rate = 0.0;     // over all post-tuning steps
    std::uint64_t seed = 0;
    int burn_in = 0;
    Vec tuned_proposal_sd;

    // Column-wise posterior mean over retained samples.
    Vec posterior_mean() const;
    // Empirical quantile (linear interpolation) of one coordinate.
    double quantile(int coord, double p) const;
};

// Random-walk Metropolis with independent Gaussian steps. The chain records
// the state at every retained iteration, repeated on rejection. Throws
// ChainDiverged when a 10000-step window sees acceptance below 0.001.
PosteriorChain rw_metropolis(const LogTarget& target, const Vec& x0,
                             const MhConfig& cfg,
                             std::vector<std::string> names = {});

}  // namespace popdyn
