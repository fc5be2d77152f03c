#include "popdyn/seir_covid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "popdyn/rng.hpp"

namespace popdyn {

void BinomialObservation::check() const {
    if (n < 0 || y < 0 || y > n)
        throw MalformedRow("binomial observation at t=" + std::to_string(t) +
                           ": need 0 <= y <= n");
}

const std::vector<CovidRow>& diamond_princess_rows() {
    static const std::vector<CovidRow> rows = {
        {1, true, 31, 10, 3711},   {2, true, 71, 10, 3711},
        {3, true, 171, 41, 3711},  {4, true, 6, 3, 3711},
        {5, true, 57, 6, 3711},    {6, true, 103, 65, 3711},
        {7, false, 0, 0, 3711},    {8, true, 53, 39, 3711},
        {9, true, 221, 44, 3711},  {10, false, 0, 0, 3451},
        {11, true, 217, 67, 3451}, {12, true, 289, 70, 3451},
        {13, true, 504, 99, 3183}, {14, true, 681, 88, 3183},
        {15, true, 607, 79, 3183}, {16, true, 52, 13, 2213},
    };
    return rows;
}

std::vector<BinomialObservation> covid_observations() {
    std::vector<BinomialObservation> obs;
    for (const CovidRow& r : diamond_princess_rows()) {
        if (!r.has_obs) continue;
        BinomialObservation b{static_cast<double>(r.day), r.n, r.y};
        b.check();
        obs.push_back(b);
    }
    return obs;
}

StepFunction covid_mu_s() {
    const auto& rows = diamond_princess_rows();
    std::vector<double> knots, values;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].on_ship >= rows[i - 1].on_ship) continue;
        const double rate = -std::log(static_cast<double>(rows[i].on_ship) /
                                      static_cast<double>(rows[i - 1].on_ship));
        // Drop shows up on day i+1's count; hazard acts over the day before.
        knots.push_back(static_cast<double>(rows[i - 1].day));
        values.push_back(rate);
        knots.push_back(static_cast<double>(rows[i].day));
        values.push_back(0.0);
    }
    return StepFunction(0.0, knots, values);
}

namespace {

struct ObsSlot {
    Eigen::Index offset;  // start of the (S,E,I) block in a stacked sample
    long long n;
    long long y;
    double log_choose;
};

std::vector<ObsSlot> locate_obs(const JgdlaDistribution& dist,
                                const std::vector<BinomialObservation>& obs) {
    if (dist.dim() != 3)
        throw DimensionMismatch("mc_binomial_loglik: need (S,E,I) classes");
    std::vector<ObsSlot> slots;
    for (const BinomialObservation& b : obs) {
        b.check();
        Eigen::Index k = -1;
        for (int j = 0; j < dist.n_times(); ++j)
            if (std::abs(dist.obs_times[j] - b.t) < 1e-9) k = j;
        if (k < 0)
            throw DimensionMismatch(
                "mc_binomial_loglik: distribution lacks time " +
                std::to_string(b.t));
        const double log_choose =
            std::lgamma(static_cast<double>(b.n) + 1.0) -
            std::lgamma(static_cast<double>(b.y) + 1.0) -
            std::lgamma(static_cast<double>(b.n - b.y) + 1.0);
        slots.push_back({3 * k, b.n, b.y, log_choose});
    }
    return slots;
}

}  // namespace

double mc_binomial_loglik_with_z(const JgdlaDistribution& dist,
                                 const std::vector<BinomialObservation>& obs,
                                 const Mat& z, McBinomStats* stats) {
    const std::vector<ObsSlot> slots = locate_obs(dist, obs);
    const Mat samples = sample_joint_with_z(dist, z);
    const int L = static_cast<int>(samples.cols());
    if (L < 1) throw Error("mc_binomial_loglik: need L >= 1");

    constexpr double p_lo = 1e-9;
    constexpr double p_hi = 1.0 - 1e-9;
    McBinomStats local;
    std::vector<double> logprod(L, 0.0);
    std::vector<bool> conflicted(L, false);
    for (int l = 0; l < L; ++l) {
        double acc = 0.0;
        for (const ObsSlot& s : slots) {
            if (s.n == 0) continue;
            const double S = samples(s.offset + 0, l);
            const double E = samples(s.offset + 1, l);
            const double I = samples(s.offset + 2, l);
            const double tot = S + E + I;
            double p = tot > 0.0 ? I / tot : 0.0;
            if (p < p_lo) {
                p = p_lo;
                ++local.clamp_events;
                if (s.y > 0) conflicted[l] = true;
            } else if (p > p_hi) {
                p = p_hi;
                ++local.clamp_events;
                if (s.y < s.n) conflicted[l] = true;
            }
            acc += s.log_choose + static_cast<double>(s.y) * std::log(p) +
                   static_cast<double>(s.n - s.y) * std::log1p(-p);
        }
        logprod[l] = acc;
    }

    const bool all_conflicted =
        std::all_of(conflicted.begin(), conflicted.end(),
                    [](bool b) { return b; });
    if (all_conflicted) {
        local.degenerate = true;
        if (stats) *stats = local;
        return -1e10;
    }

    const double m = *std::max_element(logprod.begin(), logprod.end());
    double sum = 0.0;
    for (double v : logprod) sum += std::exp(v - m);
    if (stats) *stats = local;
    return m + std::log(sum) - std::log(static_cast<double>(L));
}

double mc_binomial_loglik(const JgdlaDistribution& dist,
                          const std::vector<BinomialObservation>& obs, int L,
                          std::uint64_t seed, McBinomStats* stats) {
    if (L < 1) throw Error("mc_binomial_loglik: need L >= 1");
    RngStream rng(seed);
    Mat z(dist.mean.size(), L);
    for (int c = 0; c < L; ++c)
        for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = rng.normal();
    return mc_binomial_loglik_with_z(dist, obs, z, stats);
}

SeirChainResult seir_mh_sampler(const std::vector<BinomialObservation>& data,
                                const SeirSamplerConfig& cfg) {
    if (data.empty()) throw Error("seir_mh_sampler: no observations");
    std::vector<double> times;
    for (const BinomialObservation& b : data) times.push_back(b.t);
    if (!std::is_sorted(times.begin(), times.end()))
        throw NonMonotoneTime("seir_mh_sampler: observations must be in time order");
    const double t_end = times.back();

    const ReactionNetwork net = build_seir(covid_mu_s());
    const Prior pr_beta = Prior::truncated_normal(
        0.0, 15.0, 0.0, std::numeric_limits<double>::infinity());
    const Prior pr_alpha = pr_beta;
    const Prior pr_gamma = Prior::truncated_normal(
        0.0, 0.3, 0.0, std::numeric_limits<double>::infinity());
    const Prior pr_s0 = Prior::truncated_normal(0.0, 0.3, 0.0, 1.0);
    const Prior pr_i0 = Prior::truncated_normal(0.0, 0.1, 0.0, 1.0);

    SeirChainResult result;
    const auto target = [&](const Vec& w, std::uint64_t iter) -> double {
        double logp = 0.0;
        double th[3];
        for (int j = 0; j < 3; ++j) {
            th[j] = std::exp(w[j]);
            if (!std::isfinite(th[j]) || th[j] <= 0.0)
                return -std::numeric_limits<double>::infinity();
        }
        logp += pr_beta.logpdf(th[0]) + w[0];
        logp += pr_alpha.logpdf(th[1]) + w[1];
        logp += pr_gamma.logpdf(th[2]) + w[2];
        const double s0 = w[3], i0 = w[4];
        logp += pr_s0.logpdf(s0) + pr_i0.logpdf(i0);
        if (!std::isfinite(logp)) return logp;
        if (s0 + i0 >= 1.0) return -std::numeric_limits<double>::infinity();

        Vec x0(3);
        x0 << s0, 1.0 - s0 - i0, i0;
        try {
            const ParamVector theta = ParamVector::seir(th[0], th[1], th[2]);
            const JgdlaDistribution dist = jgdla_build(
                net, theta, x0, t_end, cfg.h, times, kCovidPopulation);
            McBinomStats st;
            const double ll = mc_binomial_loglik(
                dist, data, cfg.L, derive_seed(cfg.mc_seed, iter), &st);
            result.clamp_events += st.clamp_events;
            result.degenerate_evals += st.degenerate ? 1 : 0;
            return logp + ll;
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    Vec start = cfg.start;
    if (start.size() != 5) {
        start.resize(5);
        start << 2.0, 0.5, 0.5, 0.5, 0.05;
    }
    Vec w0(5);
    w0 << std::log(start[0]), std::log(start[1]), std::log(start[2]),
        start[3], start[4];

    MhConfig mh = cfg.mh;
    mh.refresh_current = true;
    if (mh.proposal_sd.size() != 5) {
        mh.proposal_sd.resize(5);
        mh.proposal_sd << cfg.theta_log_sd, cfg.theta_log_sd, cfg.theta_log_sd,
            cfg.init_sd, cfg.init_sd;
    }

    result.chain = rw_metropolis(target, w0, mh,
                                 {"beta", "alpha", "gamma", "S0", "I0"});
    for (Vec& s : result.chain.samples)
        for (int j = 0; j < 3; ++j) s[j] = std::exp(s[j]);
    return result;
}

std::vector<std::pair<double, double>> seir_p_curve(const ParamVector& theta,
                                                    double s0, double i0,
                                                    double t_end, double h,
                                                    double report_dt) {
    if (!(s0 > 0.0) || !(i0 > 0.0) || s0 + i0 >= 1.0)
        throw Error("seir_p_curve: need S(0), I(0) > 0 with S(0)+I(0) < 1");
    const ReactionNetwork net = build_seir(covid_mu_s());
    Vec x0(3);
    x0 << s0, 1.0 - s0 - i0, i0;
    const OdeSolution ode = solve_dagger(net, theta, x0, t_end, h);
    std::vector<std::pair<double, double>> curve;
    for (double t = 0.0; t <= t_end + 1e-9; t += report_dt) {
        const Vec x = ode.value_at(std::min(t, t_end));
        const double tot = x[0] + x[1] + x[2];
        curve.emplace_back(std::min(t, t_end), tot > 0.0 ? x[2] / tot : 0.0);
    }
    return curve;
}

}  // namespace popdyn
