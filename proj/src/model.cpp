#include "popdyn/model.hpp"

#include <cmath>
#include <utility>

namespace popdyn {

namespace {
constexpr double kNegativeRateTol = 1e-12;
constexpr double kFdStep = 1e-6;
}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> class_names,
                                 std::vector<StoichVec> stoich,
                                 std::vector<RateFn> rates,
                                 std::optional<JacobianFn> jacobian,
                                 std::vector<double> rate_breakpoints)
    : d_(static_cast<int>(class_names.size())),
      n_(static_cast<int>(stoich.size())),
      class_names_(std::move(class_names)),
      stoich_(std::move(stoich)),
      rates_(std::move(rates)),
      jacobian_(std::move(jacobian)),
      rate_breakpoints_(std::move(rate_breakpoints)) {
    if (rates_.size() != stoich_.size())
        throw DimensionMismatch("ReactionNetwork: one rate per reaction required");
    for (const auto& r : stoich_) {
        if (r.size() != d_)
            throw DimensionMismatch("ReactionNetwork: stoichiometry dimension != d");
        if (r.isZero())
            throw Error("ReactionNetwork: stoichiometry vector is all zero");
    }
}

Vec ReactionNetwork::rates(const Vec& x, const ParamVector& theta, double t) const {
    Vec lam(n_);
    for (int i = 0; i < n_; ++i) {
        double v = rates_[i](x, theta, t);
        if (!std::isfinite(v))
            throw NonFiniteRate("rate " + std::to_string(i) + " is not finite at t=" +
                                std::to_string(t));
        if (v < 0.0) {
            if (v < -kNegativeRateTol)
                throw NonFiniteRate("rate " + std::to_string(i) + " is negative (" +
                                    std::to_string(v) + ")");
            v = 0.0;
        }
        lam[i] = v;
    }
    return lam;
}

Vec ReactionNetwork::rates_floored(const Vec& x, const ParamVector& theta, double t) const {
    Vec lam(n_);
    for (int i = 0; i < n_; ++i) {
        const double v = rates_[i](x, theta, t);
        if (!std::isfinite(v))
            throw NonFiniteRate("rate " + std::to_string(i) + " is not finite at t=" +
                                std::to_string(t));
        lam[i] = v > 0.0 ? v : 0.0;
    }
    return lam;
}

Vec ReactionNetwork::drift(const Vec& x, const ParamVector& theta, double t) const {
    const Vec lam = rates(x, theta, t);
    Vec f = Vec::Zero(d_);
    for (int i = 0; i < n_; ++i) f += stoich_[i].cast<double>() * lam[i];
    return f;
}

Mat ReactionNetwork::diffusion_factor(const Vec& x, const ParamVector& theta,
                                      double t) const {
    const Vec lam = rates(x, theta, t);
    Mat q(d_, n_);
    for (int i = 0; i < n_; ++i)
        q.col(i) = stoich_[i].cast<double>() * std::sqrt(lam[i]);
    return q;
}

Mat ReactionNetwork::covariance(const Vec& x, const ParamVector& theta, double t) const {
    const Vec lam = rates_floored(x, theta, t);
    Mat sigma = Mat::Zero(d_, d_);
    for (int i = 0; i < n_; ++i) {
        const Vec r = stoich_[i].cast<double>();
        sigma += lam[i] * r * r.transpose();
    }
    return sigma;
}

Mat ReactionNetwork::jacobian(const Vec& x, const ParamVector& theta, double t) const {
    if (jacobian_) return (*jacobian_)(x, theta, t);
    return jacobian_fd(x, theta, t);
}

Mat ReactionNetwork::jacobian_fd(const Vec& x, const ParamVector& theta, double t) const {
    Mat j(d_, d_);
    Vec xp = x, xm = x;
    for (int c = 0; c < d_; ++c) {
        xp[c] = x[c] + kFdStep;
        xm[c] = x[c] - kFdStep;
        j.col(c) = (drift(xp, theta, t) - drift(xm, theta, t)) / (2.0 * kFdStep);
        xp[c] = x[c];
        xm[c] = x[c];
    }
    return j;
}

ReactionNetwork build_sir() {
    std::vector<StoichVec> stoich(2, StoichVec(2));
    stoich[0] << -1, 1;
    stoich[1] << 0, -1;
    std::vector<RateFn> rates{
        [](const Vec& x, const ParamVector& th, double) {
            return th.get("beta") * x[0] * x[1];
        },
        [](const Vec& x, const ParamVector& th, double) {
            return th.get("gamma") * x[1];
        }};
    JacobianFn jac = [](const Vec& x, const ParamVector& th, double) {
        const double beta = th.get("beta");
        const double gamma = th.get("gamma");
        Mat j(2, 2);
        j << -beta * x[1], -beta * x[0],
              beta * x[1],  beta * x[0] - gamma;
        return j;
    };
    return ReactionNetwork({"S", "I"}, std::move(stoich), std::move(rates), jac);
}

ReactionNetwork build_seir(StepFunction mu_s) {
    std::vector<StoichVec> stoich(4, StoichVec(3));
    stoich[0] << -1, 1, 0;
    stoich[1] << -1, 0, 0;
    stoich[2] << 0, -1, 1;
    stoich[3] << 0, 0, -1;
    std::vector<RateFn> rates{
        [](const Vec& x, const ParamVector& th, double) {
            return th.get("beta") * x[2] * x[0];
        },
        [mu_s](const Vec& x, const ParamVector&, double t) { return mu_s(t) * x[0]; },
        [](const Vec& x, const ParamVector& th, double) {
            return th.get("alpha") * x[1];
        },
        [](const Vec& x, const ParamVector& th, double) {
            return th.get("gamma") * x[2];
        }};
    JacobianFn jac = [mu_s](const Vec& x, const ParamVector& th, double t) {
        const double beta = th.get("beta");
        const double alpha = th.get("alpha");
        const double gamma = th.get("gamma");
        Mat j(3, 3);
        j << -(beta * x[2] + mu_s(t)), 0.0,    -beta * x[0],
              beta * x[2],             -alpha,  beta * x[0],
              0.0,                      alpha, -gamma;
        return j;
    };
    return ReactionNetwork({"S", "E", "I"}, std::move(stoich), std::move(rates), jac,
                           mu_s.breakpoints());
}

ReactionNetwork build_mass_action(std::vector<std::string> class_names,
                                  std::vector<StoichVec> stoich,
                                  std::vector<int> param_index,
                                  std::vector<Eigen::VectorXi> exponents) {
    const int n = static_cast<int>(stoich.size());
    if (static_cast<int>(param_index.size()) != n ||
        static_cast<int>(exponents.size()) != n)
        throw DimensionMismatch("build_mass_action: per-reaction data size mismatch");
    std::vector<RateFn> rates;
    rates.reserve(n);
    for (int i = 0; i < n; ++i) {
        const int pi = param_index[i];
        const Eigen::VectorXi e = exponents[i];
        rates.push_back([pi, e](const Vec& x, const ParamVector& th, double) {
            double v = th[pi];
            for (int j = 0; j < e.size(); ++j) {
                for (int k = 0; k < e[j]; ++k) v *= x[j];
            }
            return v;
        });
    }
    return ReactionNetwork(std::move(class_names), std::move(stoich), std::move(rates));
}

}  // namespace popdyn
