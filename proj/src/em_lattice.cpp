#include "popdyn/em_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "popdyn/mvn.hpp"

namespace popdyn {

double em_transition_logdensity(const ReactionNetwork& net,
                                const ParamVector& theta, const Vec& x_from,
                                const Vec& x_to, double dt, long long N,
                                EmVariant variant, double t_from) {
    if (!(dt > 0.0)) throw Error("em_transition_logdensity: dt must be > 0");
    if (x_from.size() != net.dim() || x_to.size() != net.dim())
        throw DimensionMismatch("em_transition_logdensity: state dimension");
    const Vec lam = net.rates_floored(x_from, theta, t_from);
    const Vec mean = x_from + net.drift(x_from, theta, t_from) * dt;
    Mat cov = net.covariance(x_from, theta, t_from) *
              (dt / static_cast<double>(N));
    if (variant == EmVariant::independent) {
        const Vec var = cov.diagonal();
        cov.setZero();
        cov.diagonal() = var;
    }

    for (Eigen::Index j = 0; j < cov.rows(); ++j) {
        if (cov(j, j) == 0.0)
            throw DegenerateCovariance(
                "em_transition_logdensity: class " + std::to_string(j) +
                " has zero variance (frozen state)");
    }
    if ((lam.array() == 0.0).any()) cov.diagonal().array() += 1e-12;

    Eigen::LLT<Mat> llt(cov);
    Mat l;
    if (llt.info() == Eigen::Success) {
        l = llt.matrixL();
    } else {
        const CholResult cr = chol_with_jitter(cov);
        l = cr.L;
    }
    return mvn_logpdf(x_to, mean, l);
}

int EmLattice::n_latent_times() const {
    int n = 0;
    for (bool o : observed) n += o ? 0 : 1;
    return n;
}

std::vector<int> EmLattice::latent_time_indices() const {
    std::vector<int> idx;
    for (int k = 0; k < n_lattice(); ++k)
        if (!observed[k]) idx.push_back(k);
    return idx;
}

EmLattice EmLattice::from_observations(const Trajectory& obs, double t_end,
                                       double dt) {
    if (!(dt > 0.0)) throw Error("EmLattice: dt must be > 0");
    obs.check();
    const double steps = t_end / dt;
    const long long k_max = std::llround(steps);
    if (std::abs(steps - static_cast<double>(k_max)) > 1e-9)
        throw DimensionMismatch("EmLattice: t_end is not a multiple of dt");

    EmLattice lat;
    lat.dt = dt;
    lat.times.resize(k_max + 1);
    lat.observed.assign(k_max + 1, false);
    lat.values.assign(k_max + 1, Vec());
    for (long long k = 0; k <= k_max; ++k)
        lat.times[k] = static_cast<double>(k) * dt;

    for (std::size_t i = 0; i < obs.times.size(); ++i) {
        const double pos = obs.times[i] / dt;
        const long long k = std::llround(pos);
        if (k < 0 || k > k_max || std::abs(pos - static_cast<double>(k)) > 1e-9)
            throw DimensionMismatch(
                "EmLattice: observation time " + std::to_string(obs.times[i]) +
                " is not on the lattice");
        lat.observed[k] = true;
        lat.values[k] = obs.states[i];
    }

    // Latent initial values: linear interpolation between bracketing
    // observations, extrapolating flat beyond the first/last one.
    std::vector<int> obs_idx;
    for (int k = 0; k <= static_cast<int>(k_max); ++k)
        if (lat.observed[k]) obs_idx.push_back(k);
    if (obs_idx.empty()) throw Error("EmLattice: no observations on lattice");
    for (int k = 0; k <= static_cast<int>(k_max); ++k) {
        if (lat.observed[k]) continue;
        const auto hi = std::upper_bound(obs_idx.begin(), obs_idx.end(), k);
        if (hi == obs_idx.begin()) {
            lat.values[k] = lat.values[obs_idx.front()];
        } else if (hi == obs_idx.end()) {
            lat.values[k] = lat.values[obs_idx.back()];
        } else {
            const int a = *(hi - 1), b = *hi;
            const double w = static_cast<double>(k - a) / static_cast<double>(b - a);
            lat.values[k] = (1.0 - w) * lat.values[a] + w * lat.values[b];
        }
    }
    return lat;
}

Vec EmLattice::pack_latent() const {
    Vec out(n_latent());
    Eigen::Index p = 0;
    for (int k = 0; k < n_lattice(); ++k) {
        if (observed[k]) continue;
        out.segment(p, dim()) = values[k];
        p += dim();
    }
    return out;
}

void EmLattice::set_latent(const Vec& packed) {
    if (packed.size() != n_latent())
        throw DimensionMismatch("EmLattice: packed latent size mismatch");
    Eigen::Index p = 0;
    for (int k = 0; k < n_lattice(); ++k) {
        if (observed[k]) continue;
        values[k] = packed.segment(p, dim());
        p += dim();
    }
}

double lattice_loglik(const ReactionNetwork& net, const ParamVector& theta,
                      const EmLattice& lattice, long long N,
                      EmVariant variant) {
    double total = 0.0;
    for (int k = 0; k + 1 < lattice.n_lattice(); ++k) {
        const auto at = [&](const char* what) {
            return "lattice_loglik: transition " + std::to_string(k) + " -> " +
                   std::to_string(k + 1) + ": " + what;
        };
        try {
            total += em_transition_logdensity(
                net, theta, lattice.values[k], lattice.values[k + 1],
                lattice.dt, N, variant, lattice.times[k]);
        } catch (const DegenerateCovariance& e) {
            throw DegenerateCovariance(at(e.what()));
        } catch (const NonFiniteRate& e) {
            throw NonFiniteRate(at(e.what()));
        } catch (const Error& e) {
            throw Error(at(e.what()));
        }
    }
    return total;
}

EmLattice em_sampler_lattice(const ReactionNetwork& net, const Trajectory& obs,
                             double dt) {
    (void)net;
    return EmLattice::from_observations(obs, obs.times.back(), dt);
}

PosteriorChain em_mh_sampler(const ReactionNetwork& net, const Trajectory& obs,
                             long long N, double dt,
                             const ParamVector& theta_init,
                             const std::vector<Prior>& theta_priors,
                             const EmSamplerConfig& cfg) {
    const int n_theta = static_cast<int>(theta_priors.size());
    if (n_theta != theta_init.size())
        throw DimensionMismatch("em_mh_sampler: one prior per rate parameter");
    EmLattice layout = em_sampler_lattice(net, obs, dt);
    const int n_latent = layout.n_latent();
    const Eigen::Index n_coord = n_theta + n_latent;

    Vec x0(n_coord);
    for (int j = 0; j < n_theta; ++j) x0[j] = std::log(theta_init[j]);
    x0.tail(n_latent) = layout.pack_latent();

    // Walker coordinates: log theta then packed latent. Priors act on the
    // natural scale, hence the log-scale Jacobian sum(log theta).
    auto target = [&, layout](const Vec& w, std::uint64_t) mutable -> double {
        double logp = 0.0;
        std::vector<double> vals(n_theta);
        for (int j = 0; j < n_theta; ++j) {
            const double v = std::exp(w[j]);
            if (!std::isfinite(v) || v <= 0.0)
                return -std::numeric_limits<double>::infinity();
            logp += theta_priors[j].logpdf(v) + w[j];
            vals[j] = v;
        }
        if (!std::isfinite(logp)) return logp;
        const ParamVector th = theta_init.with_values(vals);
        layout.set_latent(w.tail(n_latent));
        try {
            logp += lattice_loglik(net, th, layout, N, cfg.variant);
        } catch (const DegenerateCovariance&) {
            return -std::numeric_limits<double>::infinity();
        } catch (const NonFiniteRate&) {
            return -std::numeric_limits<double>::infinity();
        }
        return logp;
    };

    MhConfig mh = cfg.mh;
    if (mh.proposal_sd.size() != n_coord) {
        mh.proposal_sd = Vec::Constant(n_coord, cfg.latent_sd);
        mh.proposal_sd.head(n_theta).setConstant(cfg.theta_log_sd);
    }

    std::vector<std::string> names;
    for (int j = 0; j < n_theta; ++j) names.push_back(theta_init.name(j));
    for (int i = 0; i < n_latent; ++i)
        names.push_back("latent_" + std::to_string(i));

    PosteriorChain chain = rw_metropolis(target, x0, mh, std::move(names));
    for (Vec& s : chain.samples)
        for (int j = 0; j < n_theta; ++j) s[j] = std::exp(s[j]);
    return chain;
}

double em_mape(const PosteriorChain& chain, const EmLattice& layout,
               int infected_class, const Trajectory& truth,
               const std::vector<double>& pred_times) {
    if (chain.samples.empty()) throw Error("em_mape: empty chain");
    const int d = layout.dim();
    const int n_theta =
        static_cast<int>(chain.samples.front().size()) - layout.n_latent();
    const std::vector<int> latent_idx = layout.latent_time_indices();

    double total = 0.0;
    for (double t : pred_times) {
        // Locate t among the latent lattice slots.
        int slot = -1;
        for (std::size_t j = 0; j < latent_idx.size(); ++j) {
            if (std::abs(layout.times[latent_idx[j]] - t) < 1e-9) {
                slot = static_cast<int>(j);
                break;
            }
        }
        if (slot < 0)
            throw DimensionMismatch("em_mape: time " + std::to_string(t) +
                                    " is not a latent lattice time");
        const int coord = n_theta + slot * d + infected_class;

        double truth_val = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 0; j < truth.times.size(); ++j)
            if (std::abs(truth.times[j] - t) < 1e-9)
                truth_val = truth.states[j][infected_class];
        if (!std::isfinite(truth_val))
            throw DimensionMismatch("em_mape: truth missing time " +
                                    std::to_string(t));

        double acc = 0.0;
        for (const Vec& s : chain.samples) acc += std::abs(s[coord] - truth_val);
        total += acc / static_cast<double>(chain.samples.size());
    }
    return total / static_cast<double>(pred_times.size());
}

}  // namespace popdyn
