#include <doctest.h>

#include <cmath>
#include <vector>

#include "popdyn/jgdla.hpp"
#include "popdyn/model.hpp"
#include "popdyn/mvn.hpp"
#include "popdyn/ode.hpp"
#include "popdyn/seir_covid.hpp"

using namespace popdyn;

namespace {

// log C(n, y) without lgamma.
double log_choose(long long n, long long y) {
    double acc = 0.0;
    for (long long k = 1; k <= y; ++k)
        acc += std::log(static_cast<double>(n - y + k)) -
               std::log(static_cast<double>(k));
    return acc;
}

// Minimal three-class distribution with isotropic covariance, for driving
// the Monte Carlo likelihood with hand-chosen draws.
JgdlaDistribution synthetic_dist(const Vec& mean, double var) {
    JgdlaDistribution dist;
    dist.obs_times = {1.0};
    dist.N = 1000;
    dist.mean = mean;
    dist.cov = var * Mat::Identity(3, 3);
    dist.chol = std::sqrt(var) * Mat::Identity(3, 3);
    dist.cov_y_blocks = {Mat::Zero(3, 3)};
    dist.u_at_obs = {Mat::Identity(3, 3)};
    return dist;
}

}  // namespace

TEST_CASE("the embedded cruise-ship record matches the published counts") {
    const auto& rows = diamond_princess_rows();
    REQUIRE(rows.size() == 16);
    CHECK(rows[0].day == 1);
    CHECK(rows[0].n == 31);
    CHECK(rows[0].y == 10);
    CHECK(rows[0].on_ship == 3711);
    CHECK(rows[5].n == 103);
    CHECK(rows[5].y == 65);
    CHECK(rows[12].day == 13);
    CHECK(rows[12].n == 504);
    CHECK(rows[12].y == 99);
    CHECK(rows[12].on_ship == 3183);
    CHECK(rows[15].n == 52);
    CHECK(rows[15].y == 13);
    CHECK(rows[15].on_ship == 2213);
    CHECK_FALSE(rows[6].has_obs);
    CHECK_FALSE(rows[9].has_obs);
    for (const CovidRow& r : rows) {
        if (r.has_obs) CHECK(r.y <= r.n);
    }
    CHECK(kCovidPopulation == 3711);
}

TEST_CASE("observation extraction keeps the fourteen tested days") {
    const auto obs = covid_observations();
    REQUIRE(obs.size() == 14);
    const std::vector<double> days{1, 2, 3, 4, 5, 6, 8, 9, 11, 12, 13, 14, 15,
                                   16};
    for (std::size_t i = 0; i < obs.size(); ++i) {
        CHECK(obs[i].t == days[i]);
        CHECK(obs[i].n > 0);
    }
    CHECK(obs[3].n == 6);
    CHECK(obs[3].y == 3);
}

TEST_CASE("binomial rows reject more positives than tests") {
    BinomialObservation bad{2.0, 5, 6};
    CHECK_THROWS_AS(bad.check(), MalformedRow);
    BinomialObservation fine{2.0, 5, 5};
    CHECK_NOTHROW(fine.check());
}

TEST_CASE("the disembarkment hazard sheds exactly the observed fractions") {
    const StepFunction mu = covid_mu_s();
    CHECK(mu(0.0) == 0.0);
    CHECK(mu(8.9) == 0.0);
    CHECK(mu(10.5) == 0.0);
    CHECK(mu(14.0) == 0.0);
    CHECK(mu(9.5) == doctest::Approx(-std::log(3451.0 / 3711.0)).epsilon(1e-12));
    CHECK(mu(12.5) ==
          doctest::Approx(-std::log(3183.0 / 3451.0)).epsilon(1e-12));
    CHECK(mu(15.5) ==
          doctest::Approx(-std::log(2213.0 / 3183.0)).epsilon(1e-12));
    // One day at the interval's constant rate removes next/prev of the mass.
    CHECK(std::exp(-mu(9.5)) == doctest::Approx(3451.0 / 3711.0).epsilon(1e-12));
    CHECK(std::exp(-mu(12.5)) ==
          doctest::Approx(3183.0 / 3451.0).epsilon(1e-12));
    CHECK(std::exp(-mu(15.5)) ==
          doctest::Approx(2213.0 / 3183.0).epsilon(1e-12));
    CHECK(mu.breakpoints() ==
          std::vector<double>{9.0, 10.0, 12.0, 13.0, 15.0, 16.0});
}

TEST_CASE("a single noise-free draw gives the exact binomial mass") {
    const ParamVector theta = ParamVector::seir(3.108, 0.526, 0.876);
    Vec x0(3);
    x0 << 0.545, 1.0 - 0.545 - 0.088, 0.088;
    const ReactionNetwork net = build_seir(covid_mu_s());
    const JgdlaDistribution dist =
        jgdla_build(net, theta, x0, 1.0, 0.01, {1.0}, kCovidPopulation);

    // Independent plug-in probability from the deterministic path.
    const OdeSolution ode = solve_dagger(net, theta, x0, 1.0, 0.01);
    const Vec x1 = ode.value_at(1.0);
    const double p = x1[2] / (x1[0] + x1[1] + x1[2]);
    const double expected =
        log_choose(31, 10) + 10.0 * std::log(p) + 21.0 * std::log(1.0 - p);

    const std::vector<BinomialObservation> obs{{1.0, 31, 10}};
    McBinomStats stats;
    const double got =
        mc_binomial_loglik_with_z(dist, obs, Mat::Zero(3, 1), &stats);
    CHECK(got == doctest::Approx(expected).epsilon(1e-10));
    CHECK(stats.clamp_events == 0);
    CHECK_FALSE(stats.degenerate);
}

TEST_CASE("days without tests contribute nothing to the likelihood") {
    const Vec mean = (Vec(3) << 0.5, 0.3, 0.2).finished();
    const JgdlaDistribution dist = synthetic_dist(mean, 1e-4);
    const std::vector<BinomialObservation> with{{1.0, 10, 3}, {1.0, 0, 0}};
    const std::vector<BinomialObservation> without{{1.0, 10, 3}};
    const Mat z = Mat::Random(3, 40);
    CHECK(mc_binomial_loglik_with_z(dist, with, z) ==
          mc_binomial_loglik_with_z(dist, without, z));
}

TEST_CASE("the Monte Carlo average is a log-sum-exp over draws") {
    const Vec mean = (Vec(3) << 0.5, 0.3, 0.2).finished();
    const JgdlaDistribution dist = synthetic_dist(mean, 1e-4);
    Mat z = Mat::Zero(3, 2);
    z(2, 1) = 1.0;  // second draw shifts I by one covariance-scale unit
    const double p1 = 0.2 / 1.0;
    const double p2 = 0.21 / 1.01;
    const double lc = log_choose(10, 3);
    const double a = lc + 3.0 * std::log(p1) + 7.0 * std::log(1.0 - p1);
    const double b = lc + 3.0 * std::log(p2) + 7.0 * std::log(1.0 - p2);
    const double expected = std::log(0.5 * (std::exp(a) + std::exp(b)));
    const std::vector<BinomialObservation> obs{{1.0, 10, 3}};
    CHECK(mc_binomial_loglik_with_z(dist, obs, z) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("sampled probabilities clamp instead of hitting the boundary") {
    // All infection mass: P = 1 exactly, clamped high; y = n agrees with it.
    const JgdlaDistribution at_one =
        synthetic_dist((Vec(3) << 0.0, 0.0, 0.1).finished(), 1e-6);
    McBinomStats stats;
    const std::vector<BinomialObservation> all_pos{{1.0, 5, 5}};
    const double got =
        mc_binomial_loglik_with_z(at_one, all_pos, Mat::Zero(3, 1), &stats);
    CHECK(stats.clamp_events == 1);
    CHECK_FALSE(stats.degenerate);
    CHECK(got == doctest::Approx(5.0 * std::log1p(-1e-9)).epsilon(1e-6));
}

TEST_CASE("draws that contradict the data yield the degenerate floor") {
    // No infection mass: P = 0, but positives were observed.
    const JgdlaDistribution at_zero =
        synthetic_dist((Vec(3) << 0.9, 0.1, 0.0).finished(), 1e-8);
    McBinomStats stats;
    const std::vector<BinomialObservation> obs{{1.0, 31, 10}};
    const double got =
        mc_binomial_loglik_with_z(at_zero, obs, Mat::Zero(3, 1), &stats);
    CHECK(got == -1e10);
    CHECK(stats.degenerate);
    CHECK(stats.clamp_events == 1);
}

TEST_CASE("the likelihood needs a three-class state and matching times") {
    const ReactionNetwork sir = build_sir();
    const JgdlaDistribution two_class = jgdla_build(
        sir, ParamVector::sir(0.5, 0.15), (Vec(2) << 0.95, 0.05).finished(),
        5.0, 0.01, {5.0}, 1000);
    const std::vector<BinomialObservation> obs{{5.0, 10, 3}};
    CHECK_THROWS_AS(mc_binomial_loglik(two_class, obs, 4, 1),
                    DimensionMismatch);

    const JgdlaDistribution three =
        synthetic_dist((Vec(3) << 0.5, 0.3, 0.2).finished(), 1e-4);
    const std::vector<BinomialObservation> wrong_time{{2.0, 10, 3}};
    CHECK_THROWS_AS(mc_binomial_loglik(three, wrong_time, 4, 1),
                    DimensionMismatch);
}

TEST_CASE("the fresh-draw estimator varies by seed but not within one") {
    const ParamVector theta = ParamVector::seir(3.0, 0.5, 0.9);
    Vec x0(3);
    x0 << 0.55, 0.36, 0.09;
    const ReactionNetwork net = build_seir(covid_mu_s());
    const JgdlaDistribution dist =
        jgdla_build(net, theta, x0, 6.0, 0.01, {1.0, 3.0, 6.0},
                    kCovidPopulation);
    const std::vector<BinomialObservation> obs{{1.0, 31, 10},
                                               {3.0, 171, 41},
                                               {6.0, 103, 65}};
    const double a = mc_binomial_loglik(dist, obs, 64, 5);
    const double b = mc_binomial_loglik(dist, obs, 64, 5);
    const double c = mc_binomial_loglik(dist, obs, 64, 6);
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("plug-in positive-test curve tracks the observed positivity") {
    const ParamVector theta = ParamVector::seir(3.108, 0.526, 0.876);
    const auto curve = seir_p_curve(theta, 0.545, 0.088, 16.0, 0.01, 1.0);
    REQUIRE(curve.size() == 17);
    CHECK(curve[0].first == 0.0);
    CHECK(curve[0].second == doctest::Approx(0.088).epsilon(1e-12));
    for (const auto& [t, p] : curve) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
    // Daily positive fractions are single binomial draws and scatter widely
    // (0.11 on day 5 against 0.74 on day 8), so the curve is held to the
    // observed series only on average.
    double mad = 0.0;
    double n = 0.0;
    for (const BinomialObservation& b : covid_observations()) {
        const auto& [t, p] = curve[static_cast<std::size_t>(std::llround(b.t))];
        CHECK(t == b.t);
        mad += std::abs(p - static_cast<double>(b.y) / static_cast<double>(b.n));
        n += 1.0;
    }
    CHECK(mad / n < 0.2);
    CHECK_THROWS_AS(seir_p_curve(theta, 0.9, 0.2, 16.0, 0.01, 1.0), Error);
}

TEST_CASE("a short posterior run respects the support constraints") {
    SeirSamplerConfig cfg;
    cfg.mh.iterations = 30;
    cfg.mh.burn_in = 10;
    cfg.mh.seed = 3;
    cfg.mh.tune = false;
    cfg.L = 25;
    const SeirChainResult res = seir_mh_sampler(covid_observations(), cfg);
    CHECK(res.chain.samples.size() == 20);
    CHECK(res.chain.names ==
          std::vector<std::string>{"beta", "alpha", "gamma", "S0", "I0"});
    for (const Vec& s : res.chain.samples) {
        CHECK(s[0] > 0.0);
        CHECK(s[1] > 0.0);
        CHECK(s[2] > 0.0);
        CHECK(s[3] > 0.0);
        CHECK(s[3] < 1.0);
        CHECK(s[4] > 0.0);
        CHECK(s[4] < 1.0);
        CHECK(s[3] + s[4] < 1.0);
    }
    CHECK(res.clamp_events >= 0);
    CHECK(res.degenerate_evals >= 0);
}
