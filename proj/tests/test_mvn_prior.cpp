#include <doctest.h>

#include <cmath>
#include <vector>

#include "popdyn/mvn.hpp"
#include "popdyn/prior.hpp"
#include "popdyn/rng.hpp"

using namespace popdyn;

namespace {

Mat random_spd(int d, RngStream& rng) {
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = rng.normal();
    return a * a.transpose() + 0.5 * Mat::Identity(d, d);
}

Vec random_vec(int d, RngStream& rng) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace

TEST_CASE("standard normal density at the origin") {
    const Vec zero = Vec::Zero(3);
    const Mat l = Mat::Identity(3, 3);
    CHECK(mvn_logpdf(zero, zero, l) ==
          doctest::Approx(-1.5 * std::log(2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("density matches the explicit quadratic form") {
    RngStream rng(31);
    for (int rep = 0; rep < 50; ++rep) {
        const Mat cov = random_spd(4, rng);
        const Vec mean = random_vec(4, rng);
        const Vec x = random_vec(4, rng);
        const CholResult cr = chol_with_jitter(cov);
        const double got = mvn_logpdf(x, mean, cr.L);
        const Vec r = x - mean;
        const double expected =
            -0.5 * (4.0 * std::log(2.0 * M_PI) +
                    std::log(cov.determinant()) +
                    r.dot(cov.inverse() * r));
        CHECK(got == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("cholesky with jitter reports zero jitter on healthy matrices") {
    RngStream rng(37);
    const Mat cov = random_spd(5, rng);
    const CholResult cr = chol_with_jitter(cov);
    CHECK(cr.jitter == 0.0);
    CHECK((cr.L * cr.L.transpose() - cov).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mildly indefinite matrices are rescued by jitter") {
    Mat cov(2, 2);
    cov << 1.0, 1.0, 1.0, 1.0 - 1e-14;  // numerically semidefinite
    const CholResult cr = chol_with_jitter(cov);
    CHECK(cr.jitter > 0.0);
    CHECK(cr.jitter <= 1e-8);
}

TEST_CASE("strongly indefinite matrices are rejected") {
    Mat cov(2, 2);
    cov << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(chol_with_jitter(cov), NotPositiveDefinite);
}

TEST_CASE("a non-positive cholesky diagonal is rejected") {
    Mat l = Mat::Identity(2, 2);
    l(1, 1) = 0.0;
    const Vec zero = Vec::Zero(2);
    CHECK_THROWS_AS(mvn_logpdf(zero, zero, l), NonPositiveDiagonal);
}

TEST_CASE("conditioning a diagonal joint returns the marginal") {
    Vec mean(4);
    mean << 1.0, 2.0, 3.0, 4.0;
    Mat cov = Mat::Zero(4, 4);
    cov.diagonal() << 0.1, 0.2, 0.3, 0.4;
    Vec given(2);
    given << 9.0, -9.0;
    const ConditionalMvn c = mvn_condition(mean, cov, {0, 2}, {1, 3}, given);
    CHECK(c.mean[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.mean[1] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(c.cov(0, 0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(c.cov(1, 1) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(std::abs(c.cov(0, 1)) < 1e-14);
}

TEST_CASE("sequential conditioning equals joint conditioning") {
    RngStream rng(43);
    for (int rep = 0; rep < 20; ++rep) {
        const Mat cov = random_spd(6, rng);
        const Vec mean = random_vec(6, rng);
        Vec vals(2);
        vals << rng.normal(), rng.normal();

        // Condition on coordinates {4, 5} at once.
        const ConditionalMvn joint =
            mvn_condition(mean, cov, {0, 1, 2, 3}, {4, 5}, vals);

        // Condition on 4 first, then on 5 within the reduced problem.
        Vec v4(1), v5(1);
        v4 << vals[0];
        v5 << vals[1];
        const ConditionalMvn step1 =
            mvn_condition(mean, cov, {0, 1, 2, 3, 5}, {4}, v4);
        const ConditionalMvn step2 =
            mvn_condition(step1.mean, step1.cov, {0, 1, 2, 3}, {4}, v5);

        CHECK((joint.mean - step2.mean).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((joint.cov - step2.cov).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("overlapping keep and given indices are rejected") {
    const Vec mean = Vec::Zero(3);
    const Mat cov = Mat::Identity(3, 3);
    Vec v(1);
    v << 0.0;
    CHECK_THROWS_AS(mvn_condition(mean, cov, {0, 1}, {1}, v),
                    DimensionMismatch);
}

TEST_CASE("half-normal prior density and support") {
    const Prior p = Prior::half_normal(1.0);
    // Twice the standard normal density on the positive half line.
    const double at1 = std::log(2.0) - 0.5 * std::log(2.0 * M_PI) - 0.5;
    CHECK(p.logpdf(1.0) == doctest::Approx(at1).epsilon(1e-13));
    CHECK(std::isinf(p.logpdf(-0.01)));
    CHECK(p.logpdf(-0.01) < 0.0);
}

TEST_CASE("truncated normal density is renormalized to its support") {
    const Prior p = Prior::truncated_normal(0.0, 0.3, 0.0, 1.0);
    // Mass of N(0, 0.3^2) on (0,1): Phi(1/0.3) - Phi(0).
    const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double mass = phi(1.0 / 0.3) - phi(0.0);
    const double at_half = -0.5 * std::log(2.0 * M_PI) - std::log(0.3) -
                           0.5 * (0.5 / 0.3) * (0.5 / 0.3) - std::log(mass);
    CHECK(p.logpdf(0.5) == doctest::Approx(at_half).epsilon(1e-12));
    CHECK(std::isinf(p.logpdf(1.5)));
    CHECK(std::isinf(p.logpdf(-0.1)));
}

TEST_CASE("truncated normal integrates to one over its support") {
    const Prior cases[] = {Prior::truncated_normal(0.0, 0.3, 0.0, 1.0),
                           Prior::truncated_normal(0.0, 15.0, 0.0,
                                                   std::numeric_limits<double>::infinity()),
                           Prior::half_normal(1.0)};
    const double uppers[] = {1.0, 200.0, 12.0};  // effective support ends
    for (int c = 0; c < 3; ++c) {
        const int n = 200000;
        const double lo = 0.0, hi = uppers[c];
        const double h = (hi - lo) / n;
        double sum = 0.0;
        for (int k = 0; k <= n; ++k) {
            const double x = lo + k * h;
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            const double lp = cases[c].logpdf(x);
            if (std::isfinite(lp)) sum += w * std::exp(lp);
        }
        CHECK(std::abs(sum * h - 1.0) < 1e-6);
    }
}
