#pragma once

#include <cmath>
#include <limits>

#include "popdyn/errors.hpp"

namespace popdyn {

// Univariate prior density. Supports the half-normal on [0, inf) and the
// normal truncated to a finite or half-open interval, both renormalized.
class Prior {
  public:
    static Prior half_normal(double scale) {
        if (!(scale > 0.0)) throw Error("Prior: scale must be > 0");
        Prior p;
        p.mean_ = 0.0;
        p.sd_ = scale;
        p.lo_ = 0.0;
        p.hi_ = std::numeric_limits<double>::infinity();
        p.log_z_ = std::log(0.5);
        return p;
    }

    static Prior truncated_normal(double mean, double sd, double lo, double hi) {
        if (!(sd > 0.0)) throw Error("Prior: sd must be > 0");
        if (!(lo < hi)) throw Error("Prior: lower bound must be < upper bound");
        Prior p;
        p.mean_ = mean;
        p.sd_ = sd;
        p.lo_ = lo;
        p.hi_ = hi;
        const double z = phi(p.std(hi)) - phi(p.std(lo));
        if (!(z > 0.0)) throw Error("Prior: truncation interval has no mass");
        p.log_z_ = std::log(z);
        return p;
    }

    double logpdf(double x) const {
        if (x < lo_ || x > hi_)
            return -std::numeric_limits<double>::infinity();
        const double z = std(x);
        constexpr double log_sqrt_2pi = 0.9189385332046727418;
        return -log_sqrt_2pi - std::log(sd_) - 0.5 * z * z - log_z_;
    }

    double lower() const { return lo_; }
    double upper() const { return hi_; }

  private:
    Prior() = default;
    double std(double x) const { return (x - mean_) / sd_; }
    static double phi(double z) {
        if (std::isinf(z)) return z > 0 ? 1.0 : 0.0;
        return 0.5 * std::erfc(-z / std::sqrt(2.0));
    }

    double mean_ = 0.0;
    double sd_ = 1.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
    double log_z_ = 0.0;  // log of the mass retained by the truncation
};

}  // namespace popdyn
