#include "popdyn/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popdyn/errors.hpp"
#include "popdyn/rng.hpp"

namespace popdyn {

Vec PosteriorChain::posterior_mean() const {
    if (samples.empty()) throw Error("PosteriorChain: no retained samples");
    Vec m = Vec::Zero(samples.front().size());
    for (const Vec& s : samples) m += s;
    return m / static_cast<double>(samples.size());
}

double PosteriorChain::quantile(int coord, double p) const {
    if (samples.empty()) throw Error("PosteriorChain: no retained samples");
    if (coord < 0 || coord >= samples.front().size())
        throw DimensionMismatch("PosteriorChain::quantile: coordinate out of range");
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) v[i] = samples[i][coord];
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

namespace {

struct Walker {
    RngStream rng;
    Vec x;
    double logp;
    std::uint64_t iter = 0;

    // Returns true on acceptance; sd scales the per-coordinate step. With
    // refresh, current and proposal share the iteration's substream so the
    // comparison uses common random numbers.
    bool step(const LogTarget& target, const Vec& sd, bool refresh) {
        Vec prop = x;
        for (Eigen::Index j = 0; j < prop.size(); ++j)
            prop[j] += sd[j] * rng.normal();
        const double logp_cur = refresh ? target(x, iter) : logp;
        const double logp_prop = target(prop, iter);
        ++iter;
        if (!std::isfinite(logp_prop) ||
            std::log(rng.uniform01()) > logp_prop - logp_cur) {
            logp = logp_cur;
            return false;
        }
        x = prop;
        logp = logp_prop;
        return true;
    }
};

}  // namespace

PosteriorChain rw_metropolis(const LogTarget& target, const Vec& x0,
                             const MhConfig& cfg,
                             std::vector<std::string> names) {
    if (cfg.proposal_sd.size() != x0.size())
        throw DimensionMismatch("rw_metropolis: proposal_sd size != x0 size");
    if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations)
        throw Error("rw_metropolis: burn_in must be in [0, iterations)");

    Walker w{RngStream(cfg.seed), x0, target(x0, 0), 1};
    if (!std::isfinite(w.logp))
        throw Error("rw_metropolis: log target not finite at the start point");

    Vec sd = cfg.proposal_sd;
    if (cfg.tune) {
        for (int round = 0; round < cfg.tune_rounds; ++round) {
            int accepted = 0;
            for (int i = 0; i < cfg.tune_block; ++i)
                accepted += w.step(target, sd, cfg.refresh_current) ? 1 : 0;
            const double rate =
                static_cast<double>(accepted) / static_cast<double>(cfg.tune_block);
            if (rate < cfg.target_low)
                sd *= 0.7;
            else if (rate > cfg.target_high)
                sd *= 1.4;
            else
                break;
        }
    }

    PosteriorChain chain;
    chain.names = std::move(names);
    chain.seed = cfg.seed;
    chain.burn_in = cfg.burn_in;
    chain.tuned_proposal_sd = sd;
    chain.accepts.reserve(cfg.iterations);
    chain.samples.reserve(cfg.iterations - cfg.burn_in);
    chain.logposts.reserve(cfg.iterations - cfg.burn_in);

    long long window_accepts = 0;
    int window_len = 0;
    long long total_accepts = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
        const bool acc = w.step(target, sd, cfg.refresh_current);
        chain.accepts.push_back(acc ? 1 : 0);
        total_accepts += acc ? 1 : 0;
        window_accepts += acc ? 1 : 0;
        if (++window_len == 10000) {
            if (static_cast<double>(window_accepts) / 10000.0 < 0.001)
                throw ChainDiverged(
                    "rw_metropolis: acceptance below 0.001 over a 10000-step window");
            window_accepts = 0;
            window_len = 0;
        }
        if (it >= cfg.burn_in) {
            chain.samples.push_back(w.x);
            chain.logposts.push_back(w.logp);
        }
    }
    chain.acceptance_rate =
        static_cast<double>(total_accepts) / static_cast<double>(cfg.iterations);
    return chain;
}

}  // namespace popdyn
