#pragma once

#include <vector>

#include "popdyn/model.hpp"

namespace popdyn {

// Deterministic infinite-population path X(t) on a uniform grid, with the
// fundamental matrix U(t) of the linearized flow once solve_fundamental has
// run. Immutable after construction; shared freely across threads.
struct OdeSolution {
    double h = 0.0;
    std::vector<double> grid;   // 0 = s_0 < s_1 < ... < s_M = t_end
    std::vector<Vec> x;         // X(s_m)
    std::vector<Vec> f;         // dX/dt at s_m (stored for dense output)
    std::vector<Mat> U;         // fundamental matrix, U[0] = I
    std::vector<Mat> U_inv;

    std::size_t size() const { return grid.size(); }
    double t_end() const { return grid.empty() ? 0.0 : grid.back(); }

    // Grid index of t; throws DimensionMismatch if t is not a grid point
    // (within 1e-9).
    std::size_t index_of(double t) const;

    // Dense output: cubic Hermite between grid points using the stored
    // derivatives. Exact at grid points.
    Vec value_at(double t) const;
};

// Classic fixed-step RK4 on dX/dt = F(X) from x0 over [0, t_end].
// t_end/h must be integral within 1e-9. Throws StepDiverged if the state
// norm exceeds 10.
OdeSolution solve_dagger(const ReactionNetwork& net, const ParamVector& theta,
                         const Vec& x0, double t_end, double h);

// Fills sol.U / sol.U_inv by RK4 on dU/dt = dF(X(t)) U, U(0) = I, with the
// Jacobian evaluated on the dense X(t) at stage times. U_inv is computed per
// grid point by LU with partial pivoting. Throws SingularFundamental when
// |det U| <= 1e-12.
void solve_fundamental(const ReactionNetwork& net, const ParamVector& theta,
                       OdeSolution& sol);

// Composite trapezoid of grid-sampled values over [a, b]; a and b must be
// grid points of the sampling.
double quad_trapezoid(const std::vector<double>& values, double h,
                      std::size_t ia, std::size_t ib);

}  // namespace popdyn
