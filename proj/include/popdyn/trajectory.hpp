#pragma once

#include <Eigen/Dense>
#include <vector>

#include "popdyn/errors.hpp"

namespace popdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Time-stamped state vectors (class proportions). N is the population size
// the proportions refer to; 0 when unknown (e.g., ingested from a bare CSV).
struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    long long N = 0;

    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().size()); }
    std::size_t size() const { return times.size(); }

    void check() const {
        if (times.size() != states.size())
            throw DimensionMismatch("Trajectory: times/states size mismatch");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (!(times[i] > times[i - 1]))
                throw NonMonotoneTime("Trajectory: times must be strictly increasing");
    }

    // State at the last recorded time <= t (cadlag sample-path convention).
    const Vec& value_before(double t) const {
        std::size_t lo = 0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] <= t) lo = i;
        return states[lo];
    }
};

}  // namespace popdyn
