#include "popdyn/wald.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "popdyn/errors.hpp"

namespace popdyn {

Mat fd_hessian(const std::function<double(const Vec&)>& fn, const Vec& x,
               double rel_step) {
    const Eigen::Index d = x.size();
    Vec h(d);
    for (Eigen::Index i = 0; i < d; ++i)
        h[i] = rel_step * std::max(std::abs(x[i]), 1.0);

    Mat hess(d, d);
    const double f0 = fn(x);
    for (Eigen::Index i = 0; i < d; ++i) {
        Vec xp = x, xm = x;
        xp[i] += h[i];
        xm[i] -= h[i];
        hess(i, i) = (fn(xp) - 2.0 * f0 + fn(xm)) / (h[i] * h[i]);
        for (Eigen::Index j = i + 1; j < d; ++j) {
            Vec xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h[i]; xpp[j] += h[j];
            xpm[i] += h[i]; xpm[j] -= h[j];
            xmp[i] -= h[i]; xmp[j] += h[j];
            xmm[i] -= h[i]; xmm[j] -= h[j];
            hess(i, j) = hess(j, i) =
                (fn(xpp) - fn(xpm) - fn(xmp) + fn(xmm)) / (4.0 * h[i] * h[j]);
        }
    }
    return hess;
}

WaldInterval wald_interval(const std::function<double(const Vec&)>& negloglik,
                           const Vec& mle, double rel_step) {
    const Mat info = fd_hessian(negloglik, mle, rel_step);
    Eigen::LLT<Mat> llt(info);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("wald_interval: information matrix not positive definite");
    const Mat cov = llt.solve(Mat::Identity(info.rows(), info.cols()));

    constexpr double z975 = 1.959963984540054;
    WaldInterval w;
    w.se.resize(mle.size());
    w.low.resize(mle.size());
    w.high.resize(mle.size());
    for (Eigen::Index i = 0; i < mle.size(); ++i) {
        if (!(cov(i, i) > 0.0))
            throw NotPositiveDefinite("wald_interval: non-positive variance estimate");
        w.se[i] = std::sqrt(cov(i, i));
        w.low[i] = mle[i] - z975 * w.se[i];
        w.high[i] = mle[i] + z975 * w.se[i];
    }
    return w;
}

}  // namespace popdyn
