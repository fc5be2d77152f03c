#include "popdyn/jgdla.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "popdyn/rng.hpp"

namespace popdyn {

namespace {

// Integrand M(s) = sum_i lambda_i(X(s)) a_i(s) a_i(s)' at grid index g.
Mat gram_integrand(const OdeSolution& ode, const ReactionNetwork& net,
                   const ParamVector& theta, std::size_t g) {
    const int d = net.dim();
    const Vec lam = net.rates_floored(ode.x[g], theta, ode.grid[g]);
    Mat m = Mat::Zero(d, d);
    for (int i = 0; i < net.n_reactions(); ++i) {
        const Vec a = ode.U_inv[g] * net.stoich(i).cast<double>();
        m += lam[i] * (a * a.transpose());
    }
    return m;
}

}  // namespace

std::vector<Mat> cov_y_at(const OdeSolution& ode, const ReactionNetwork& net,
                          const ParamVector& theta,
                          const std::vector<double>& times) {
    std::vector<std::size_t> idx(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        idx[k] = ode.index_of(times[k]);
        if (k > 0 && idx[k] <= idx[k - 1])
            throw NonMonotoneTime("cov_y_at: times must be strictly increasing");
    }
    const int d = net.dim();
    std::vector<Mat> out(times.size());
    Mat acc = Mat::Zero(d, d);
    Mat prev = gram_integrand(ode, net, theta, 0);
    std::size_t k = 0;
    while (k < idx.size() && idx[k] == 0) out[k++] = acc;
    for (std::size_t g = 1; g < ode.grid.size() && k < idx.size(); ++g) {
        Mat cur = gram_integrand(ode, net, theta, g);
        acc += (ode.h / 2.0) * (prev + cur);
        prev = std::move(cur);
        while (k < idx.size() && idx[k] == g) out[k++] = acc;
    }
    return out;
}

Mat cov_y(const OdeSolution& ode, const ReactionNetwork& net,
          const ParamVector& theta, double t) {
    return cov_y_at(ode, net, theta, {t}).front();
}

JgdlaDistribution assemble_sigma(const OdeSolution& ode,
                                 const ReactionNetwork& net,
                                 const ParamVector& theta,
                                 const std::vector<double>& obs_times,
                                 long long N) {
    if (obs_times.empty()) throw Error("assemble_sigma: no observation times");
    if (N < 1) throw Error("assemble_sigma: N must be >= 1");
    const int d = net.dim();
    const int T = static_cast<int>(obs_times.size());

    JgdlaDistribution dist;
    dist.obs_times = obs_times;
    dist.class_names = net.class_names();
    dist.N = N;
    dist.cov_y_blocks = cov_y_at(ode, net, theta, obs_times);
    dist.u_at_obs.resize(T);
    dist.mean.resize(static_cast<Eigen::Index>(d) * T);
    for (int k = 0; k < T; ++k) {
        const std::size_t g = ode.index_of(obs_times[k]);
        dist.u_at_obs[k] = ode.U[g];
        dist.mean.segment(static_cast<Eigen::Index>(d) * k, d) = ode.x[g];
    }

    const double inv_n = 1.0 / static_cast<double>(N);
    Mat sigma(static_cast<Eigen::Index>(d) * T, static_cast<Eigen::Index>(d) * T);
    for (int k = 0; k < T; ++k) {
        for (int l = 0; l < T; ++l) {
            const int m = std::min(k, l);
            sigma.block(static_cast<Eigen::Index>(d) * k,
                        static_cast<Eigen::Index>(d) * l, d, d) =
                inv_n * dist.u_at_obs[k] * dist.cov_y_blocks[m] *
                dist.u_at_obs[l].transpose();
        }
    }
    dist.cov = 0.5 * (sigma + sigma.transpose());
    const CholResult cr = chol_with_jitter(dist.cov);
    dist.chol = cr.L;
    dist.jitter = cr.jitter;
    return dist;
}

JgdlaDistribution jgdla_build(const ReactionNetwork& net,
                              const ParamVector& theta, const Vec& x0,
                              double t_end, double h,
                              const std::vector<double>& obs_times,
                              long long N) {
    OdeSolution ode = solve_dagger(net, theta, x0, t_end, h);
    solve_fundamental(net, theta, ode);
    return assemble_sigma(ode, net, theta, obs_times, N);
}

double jgdla_loglik(const JgdlaDistribution& dist, const Trajectory& obs) {
    const int d = dist.dim();
    if (static_cast<int>(obs.times.size()) != dist.n_times())
        throw DimensionMismatch("jgdla_loglik: observation count mismatch");
    for (int k = 0; k < dist.n_times(); ++k) {
        if (std::abs(obs.times[k] - dist.obs_times[k]) > 1e-9)
            throw DimensionMismatch("jgdla_loglik: observation times differ");
        if (obs.states[k].size() != d)
            throw DimensionMismatch("jgdla_loglik: state dimension mismatch");
    }
    Vec x(dist.mean.size());
    for (int k = 0; k < dist.n_times(); ++k)
        x.segment(static_cast<Eigen::Index>(d) * k, d) = obs.states[k];
    Mat l = dist.chol;
    return mvn_logpdf(x, dist.mean, l);
}

JgdlaPrediction condition_on_observations(const JgdlaDistribution& joint,
                                          const Trajectory& obs) {
    const int d = joint.dim();
    std::vector<int> keep, given;
    Vec x_given(static_cast<Eigen::Index>(d) * obs.times.size());
    Eigen::Index gpos = 0;
    std::vector<double> kept_times;
    std::vector<bool> matched(obs.times.size(), false);
    for (int k = 0; k < joint.n_times(); ++k) {
        const double t = joint.obs_times[k];
        std::size_t oi = obs.times.size();
        for (std::size_t j = 0; j < obs.times.size(); ++j)
            if (std::abs(obs.times[j] - t) < 1e-9) oi = j;
        for (int j = 0; j < d; ++j) {
            const int flat = d * k + j;
            if (oi < obs.times.size())
                given.push_back(flat);
            else
                keep.push_back(flat);
        }
        if (oi < obs.times.size()) {
            matched[oi] = true;
            x_given.segment(gpos, d) = obs.states[oi];
            gpos += d;
        } else {
            kept_times.push_back(t);
        }
    }
    if (!std::all_of(matched.begin(), matched.end(), [](bool b) { return b; }))
        throw DimensionMismatch(
            "condition_on_observations: an observation time is missing from "
            "the joint distribution");
    if (kept_times.empty())
        throw DimensionMismatch(
            "condition_on_observations: no prediction times remain");

    Mat cov = joint.cov;
    if (joint.jitter > 0.0) cov.diagonal().array() += joint.jitter;
    const ConditionalMvn c = mvn_condition(joint.mean, cov, keep, given, x_given);
    JgdlaPrediction pred;
    pred.pred_times = std::move(kept_times);
    pred.mean = c.mean;
    pred.cov = c.cov;
    return pred;
}

JgdlaPrediction predict_conditional(const OdeSolution& ode,
                                    const ReactionNetwork& net,
                                    const ParamVector& theta, long long N,
                                    const Trajectory& obs,
                                    const std::vector<double>& pred_times) {
    for (double tp : pred_times)
        for (double to : obs.times)
            if (std::abs(tp - to) < 1e-9)
                throw DimensionMismatch(
                    "predict_conditional: prediction time coincides with an "
                    "observation time");

    std::vector<double> all = obs.times;
    all.insert(all.end(), pred_times.begin(), pred_times.end());
    std::sort(all.begin(), all.end());
    const JgdlaDistribution joint = assemble_sigma(ode, net, theta, all, N);
    return condition_on_observations(joint, obs);
}

Mat sample_joint_with_z(const JgdlaDistribution& dist, const Mat& z) {
    if (z.rows() != dist.mean.size())
        throw DimensionMismatch("sample_joint: z row count mismatch");
    Mat out = dist.chol * z;
    out.colwise() += dist.mean;
    return out;
}

Mat sample_joint(const JgdlaDistribution& dist, int n_samples,
                 std::uint64_t seed) {
    RngStream rng(seed);
    Mat z(dist.mean.size(), n_samples);
    for (int c = 0; c < n_samples; ++c)
        for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = rng.normal();
    return sample_joint_with_z(dist, z);
}

std::string jgdla_serialize(const JgdlaDistribution& dist) {
    nlohmann::json j;
    j["times"] = dist.obs_times;
    j["classes"] = dist.class_names;
    j["N"] = dist.N;
    j["jitter"] = dist.jitter;
    j["dim"] = dist.dim();
    j["mean"] = std::vector<double>(dist.mean.data(),
                                    dist.mean.data() + dist.mean.size());
    std::vector<double> cov;
    cov.reserve(static_cast<std::size_t>(dist.cov.size()));
    for (Eigen::Index r = 0; r < dist.cov.rows(); ++r)
        for (Eigen::Index c = 0; c < dist.cov.cols(); ++c)
            cov.push_back(dist.cov(r, c));
    j["covariance"] = cov;
    return j.dump(2);
}

JgdlaDistribution jgdla_deserialize(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    JgdlaDistribution dist;
    dist.obs_times = j.at("times").get<std::vector<double>>();
    if (j.contains("classes"))
        dist.class_names = j.at("classes").get<std::vector<std::string>>();
    dist.N = j.at("N").get<long long>();
    dist.jitter = j.at("jitter").get<double>();
    const int d = j.at("dim").get<int>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto cov = j.at("covariance").get<std::vector<double>>();
    const Eigen::Index dt = static_cast<Eigen::Index>(mean.size());
    if (static_cast<std::size_t>(dt) * dt != cov.size() ||
        dt != static_cast<Eigen::Index>(d) *
                  static_cast<Eigen::Index>(dist.obs_times.size()))
        throw DimensionMismatch("jgdla_deserialize: inconsistent artifact");
    dist.mean = Eigen::Map<const Vec>(mean.data(), dt);
    dist.cov.resize(dt, dt);
    for (Eigen::Index r = 0; r < dt; ++r)
        for (Eigen::Index c = 0; c < dt; ++c)
            dist.cov(r, c) = cov[static_cast<std::size_t>(r) * dt + c];
    Mat jittered = dist.cov;
    jittered.diagonal().array() += dist.jitter;
    const CholResult cr = chol_with_jitter(jittered);
    dist.chol = cr.L;
    dist.jitter += cr.jitter;
    // Per-time blocks are not part of the artifact; recover what is needed.
    dist.cov_y_blocks.assign(dist.obs_times.size(), Mat::Zero(d, d));
    dist.u_at_obs.assign(dist.obs_times.size(), Mat::Identity(d, d));
    for (std::size_t k = 0; k < dist.obs_times.size(); ++k)
        dist.cov_y_blocks[k] = dist.cov.block(static_cast<Eigen::Index>(d) * k,
                                              static_cast<Eigen::Index>(d) * k,
                                              d, d) *
                               static_cast<double>(dist.N);
    return dist;
}

}  // namespace popdyn
