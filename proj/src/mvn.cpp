#include "popdyn/mvn.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace popdyn {

CholResult chol_with_jitter(const Mat& sigma, double initial, double ceiling) {
    if (sigma.rows() != sigma.cols())
        throw DimensionMismatch("chol_with_jitter: matrix not square");
    Eigen::LLT<Mat> llt(sigma);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
    for (double jitter = initial; jitter <= ceiling * (1.0 + 1e-12); jitter *= 10.0) {
        Mat s = sigma;
        s.diagonal().array() += jitter;
        llt.compute(s);
        if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
    }
    throw NotPositiveDefinite(
        "chol_with_jitter: factorization failed with jitter up to " +
        std::to_string(ceiling));
}

double mvn_logpdf(const Vec& x, const Vec& mean, const Mat& L) {
    const auto n = x.size();
    if (mean.size() != n || L.rows() != n || L.cols() != n)
        throw DimensionMismatch("mvn_logpdf: size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(L(i, i) > 0.0))
            throw NonPositiveDiagonal("mvn_logpdf: Cholesky diagonal entry " +
                                      std::to_string(i) + " is not positive");
    }
    const Vec w = L.template triangularView<Eigen::Lower>().solve(x - mean);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(L(i, i));
    constexpr double log2pi = 1.8378770664093454836;
    return -0.5 * static_cast<double>(n) * log2pi - logdet - 0.5 * w.squaredNorm();
}

ConditionalMvn mvn_condition(const Vec& mean, const Mat& cov,
                             const std::vector<int>& keep,
                             const std::vector<int>& given,
                             const Vec& x_given) {
    const auto n = mean.size();
    if (cov.rows() != n || cov.cols() != n)
        throw DimensionMismatch("mvn_condition: cov size mismatch");
    if (static_cast<Eigen::Index>(given.size()) != x_given.size())
        throw DimensionMismatch("mvn_condition: x_given size mismatch");
    for (int i : keep)
        for (int j : given)
            if (i == j)
                throw DimensionMismatch("mvn_condition: keep and given overlap at index " +
                                        std::to_string(i));
    const auto pick = [&](const std::vector<int>& idx) {
        for (int i : idx)
            if (i < 0 || i >= n)
                throw DimensionMismatch("mvn_condition: index out of range");
    };
    pick(keep);
    pick(given);

    const Eigen::Index a = static_cast<Eigen::Index>(keep.size());
    const Eigen::Index b = static_cast<Eigen::Index>(given.size());
    Vec mu_a(a), mu_b(b);
    Mat c_aa(a, a), c_ab(a, b), c_bb(b, b);
    for (Eigen::Index i = 0; i < a; ++i) {
        mu_a[i] = mean[keep[i]];
        for (Eigen::Index j = 0; j < a; ++j) c_aa(i, j) = cov(keep[i], keep[j]);
        for (Eigen::Index j = 0; j < b; ++j) c_ab(i, j) = cov(keep[i], given[j]);
    }
    for (Eigen::Index i = 0; i < b; ++i) {
        mu_b[i] = mean[given[i]];
        for (Eigen::Index j = 0; j < b; ++j) c_bb(i, j) = cov(given[i], given[j]);
    }

    Eigen::LLT<Mat> llt(c_bb);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("mvn_condition: conditioning block not positive definite");
    const Mat solved = llt.solve(c_ab.transpose());  // C_bb^-1 C_ba
    ConditionalMvn out;
    out.mean = mu_a + solved.transpose() * (x_given - mu_b);
    out.cov = c_aa - c_ab * solved;
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

}  // namespace popdyn
