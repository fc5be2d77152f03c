#pragma once

#include <vector>

#include "popdyn/errors.hpp"

namespace popdyn {

// Right-continuous piecewise-constant function of time: value(t) = base for
// t < knots[0], values[i] on [knots[i], knots[i+1]), values.back() from
// knots.back() on. Used for the time-varying susceptible-removal rate in the
// SEIR preset; time-invariant models never see one.
class StepFunction {
public:
    explicit StepFunction(double base = 0.0) : base_(base) {}

    StepFunction(double base, std::vector<double> knots, std::vector<double> values)
        : base_(base), knots_(std::move(knots)), values_(std::move(values)) {
        if (knots_.size() != values_.size())
            throw DimensionMismatch("StepFunction: knots/values size mismatch");
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (!(knots_[i] > knots_[i - 1]))
                throw NonMonotoneTime("StepFunction: knots must be strictly increasing");
    }

    double operator()(double t) const {
        if (knots_.empty() || t < knots_.front()) return base_;
        // last knot <= t
        std::size_t lo = 0, hi = knots_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (knots_[mid] <= t ? lo : hi) = mid;
        }
        return values_[lo];
    }

    const std::vector<double>& breakpoints() const { return knots_; }

private:
    double base_ = 0.0;
    std::vector<double> knots_;
    std::vector<double> values_;
};

}  // namespace popdyn
