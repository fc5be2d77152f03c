#include "popdyn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "popdyn/util.hpp"

namespace popdyn {

namespace {
constexpr double kCountTol = 1e-9;
}

void SimConfig::check() const {
    if (!(t_end > 0.0)) throw Error("SimConfig: t_end must be > 0");
    if (N < 1) throw Error("SimConfig: population size N must be >= 1");
    for (std::size_t i = 0; i < record_times.size(); ++i) {
        if (record_times[i] < 0.0 || record_times[i] > t_end + kCountTol)
            throw Error("SimConfig: record time outside [0, t_end]");
        if (i > 0 && !(record_times[i] > record_times[i - 1]))
            throw NonMonotoneTime("SimConfig: record times must be strictly increasing");
    }
}

Trajectory gillespie_path(const ReactionNetwork& net, const ParamVector& theta,
                          const Vec& x0, const SimConfig& cfg) {
    cfg.check();
    const int d = net.dim();
    const int n = net.n_reactions();
    const double N = static_cast<double>(cfg.N);

    Eigen::VectorXd counts(d);
    for (int j = 0; j < d; ++j) {
        const double c = x0[j] * N;
        const double r = std::round(c);
        if (std::abs(c - r) > kCountTol)
            throw NonIntegerCounts("gillespie_path: N*x0[" + std::to_string(j) +
                                   "] = " + std::to_string(c) + " is not integral");
        counts[j] = r;
    }

    RngStream rng(cfg.seed);
    const auto& bps = net.rate_breakpoints();
    const bool record_events = cfg.record_times.empty();

    Trajectory traj;
    traj.N = cfg.N;
    std::size_t rec = 0;  // next record_times index
    auto flush_records_before = [&](double t) {
        while (rec < cfg.record_times.size() && cfg.record_times[rec] < t - 1e-15) {
            traj.times.push_back(cfg.record_times[rec]);
            traj.states.push_back(counts / N);
            ++rec;
        }
    };

    double t = 0.0;
    if (record_events) {
        traj.times.push_back(0.0);
        traj.states.push_back(counts / N);
    }

    std::vector<double> lam(n);
    while (t < cfg.t_end) {
        const Vec x = counts / N;
        const Vec lv = net.rates(x, theta, t);
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += (lam[i] = lv[i]);
        const double big_rate = N * total;

        // Next time the rates change discontinuously, if any.
        double horizon = cfg.t_end;
        for (double bp : bps) {
            if (bp > t + 1e-15 && bp < horizon) horizon = bp;
        }

        if (big_rate <= 0.0) {
            // Absorbing under the current rates; coast to the horizon.
            if (horizon >= cfg.t_end) break;
            t = horizon;
            continue;
        }

        const double wait = rng.exponential(big_rate);
        if (t + wait > horizon) {
            // No event before the rate change / end; discard and resample
            // (valid for exponential waiting times with constant rates).
            t = horizon;
            continue;
        }
        t += wait;
        const int i = rng.categorical(lam, total);
        flush_records_before(t);
        counts += net.stoich(i).cast<double>();
        if (record_events) {
            traj.times.push_back(t);
            traj.states.push_back(counts / N);
        }
    }
    flush_records_before(cfg.t_end + 1.0);  // fill the tail with the final state
    if (record_events && traj.times.back() < cfg.t_end) {
        traj.times.push_back(cfg.t_end);
        traj.states.push_back(counts / N);
    }
    return traj;
}

EmPathResult em_path(const ReactionNetwork& net, const ParamVector& theta,
                     const Vec& x0, double dt, const SimConfig& cfg,
                     const EmPathOptions& opts) {
    cfg.check();
    if (!(dt > 0.0)) throw Error("em_path: dt must be > 0");
    const int d = net.dim();
    const int n = net.n_reactions();
    const double sqrt_n_inv = 1.0 / std::sqrt(static_cast<double>(cfg.N));

    RngStream rng(cfg.seed);
    EmPathResult out;
    out.trajectory.N = cfg.N;
    const bool record_all = cfg.record_times.empty();
    std::size_t rec = 0;

    auto record = [&](double t, const Vec& x) {
        if (record_all) {
            out.trajectory.times.push_back(t);
            out.trajectory.states.push_back(x);
            return;
        }
        while (rec < cfg.record_times.size() &&
               cfg.record_times[rec] <= t + 1e-9) {
            out.trajectory.times.push_back(cfg.record_times[rec]);
            out.trajectory.states.push_back(x);
            ++rec;
        }
    };

    Vec x = x0;
    double t = 0.0;
    record(0.0, x);
    while (t < cfg.t_end - 1e-12) {
        const double step = std::min(dt, cfg.t_end - t);
        const Vec lam = net.rates_floored(x, theta, t);
        Vec incr = Vec::Zero(d);
        for (int i = 0; i < n; ++i)
            incr += net.stoich(i).cast<double>() * (lam[i] * step);
        if (!opts.zero_diffusion) {
            const double scale = std::sqrt(step) * sqrt_n_inv;
            for (int i = 0; i < n; ++i) {
                const double z = rng.normal();
                incr += net.stoich(i).cast<double>() * (std::sqrt(lam[i]) * scale * z);
            }
        }
        x += incr;
        t += step;
        if (!x.allFinite())
            throw NonFiniteRate("em_path: state became non-finite at t=" +
                                std::to_string(t));
        if ((x.array() < 0.0).any() || (x.array() > 1.0).any())
            out.exited_unit_interval = true;
        record(t, x);
    }
    return out;
}

EnsembleStats ensemble(const ReactionNetwork& net, const ParamVector& theta,
                       const Vec& x0, const SimConfig& cfg, int n_paths,
                       const EnsembleOptions& opts) {
    if (n_paths < 2) throw Error("ensemble: need at least 2 paths");
    if (cfg.record_times.empty())
        throw Error("ensemble: record_times required to align paths");
    if (opts.path_seeds && static_cast<int>(opts.path_seeds->size()) != n_paths)
        throw DimensionMismatch("ensemble: path_seeds size != n_paths");

    const int d = net.dim();
    const std::size_t T = cfg.record_times.size();
    std::vector<Mat> states(n_paths);  // d x T per path
    std::vector<std::string> failures(n_paths);

    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        try {
            SimConfig local = cfg;
            local.seed = opts.path_seeds ? (*opts.path_seeds)[p]
                                         : derive_seed(cfg.seed, p);
            Trajectory traj;
            if (opts.method == SimMethod::gillespie)
                traj = gillespie_path(net, theta, x0, local);
            else
                traj = em_path(net, theta, x0, opts.em_dt, local).trajectory;
            Mat m(d, T);
            for (std::size_t k = 0; k < T; ++k) m.col(k) = traj.states[k];
            states[p] = std::move(m);
        } catch (const std::exception& e) {
            failures[p] = e.what();
        }
    });
    for (int p = 0; p < n_paths; ++p) {
        if (!failures[p].empty())
            throw EnsembleError("path " + std::to_string(p) + ": " + failures[p]);
    }

    EnsembleStats stats;
    stats.times = cfg.record_times;
    stats.n_paths = n_paths;
    stats.mean.assign(T, Vec::Zero(d));
    stats.cov.assign(T, Mat::Zero(d, d));
    for (int p = 0; p < n_paths; ++p)
        for (std::size_t k = 0; k < T; ++k) stats.mean[k] += states[p].col(k);
    for (std::size_t k = 0; k < T; ++k) stats.mean[k] /= static_cast<double>(n_paths);
    for (int p = 0; p < n_paths; ++p) {
        for (std::size_t k = 0; k < T; ++k) {
            const Vec r = states[p].col(k) - stats.mean[k];
            stats.cov[k] += r * r.transpose();
        }
    }
    for (std::size_t k = 0; k < T; ++k)
        stats.cov[k] /= static_cast<double>(n_paths - 1);
    return stats;
}

}  // namespace popdyn
