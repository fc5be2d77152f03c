#include "popdyn/ode.hpp"

#include <cmath>

namespace popdyn {

namespace {
constexpr double kDivergenceNorm = 10.0;
constexpr double kDetTol = 1e-12;
constexpr double kGridTol = 1e-9;
}  // namespace

std::size_t OdeSolution::index_of(double t) const {
    const double u = t / h;
    const auto i = static_cast<long long>(std::llround(u));
    if (i < 0 || i >= static_cast<long long>(grid.size()) ||
        std::abs(u - static_cast<double>(i)) > kGridTol / h)
        throw DimensionMismatch("time " + std::to_string(t) + " is not on the ODE grid");
    return static_cast<std::size_t>(i);
}

Vec OdeSolution::value_at(double t) const {
    if (t <= 0.0) return x.front();
    if (t >= t_end()) return x.back();
    const auto i = static_cast<std::size_t>(t / h);
    const std::size_t lo = std::min(i, x.size() - 2);
    const double tau = (t - grid[lo]) / h;
    // Cubic Hermite basis on [0,1].
    const double t2 = tau * tau, t3 = t2 * tau;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + tau;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * x[lo] + h10 * h * f[lo] + h01 * x[lo + 1] + h11 * h * f[lo + 1];
}

OdeSolution solve_dagger(const ReactionNetwork& net, const ParamVector& theta,
                         const Vec& x0, double t_end, double h) {
    if (!(h > 0.0)) throw Error("solve_dagger: step size must be positive");
    const double steps_real = t_end / h;
    const auto steps = static_cast<long long>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > kGridTol)
        throw Error("solve_dagger: t_end/h must be integral");

    OdeSolution sol;
    sol.h = h;
    sol.grid.resize(steps + 1);
    sol.x.resize(steps + 1);
    sol.f.resize(steps + 1);

    auto rhs = [&](const Vec& x, double t) { return net.drift(x, theta, t); };

    Vec x = x0;
    sol.grid[0] = 0.0;
    sol.x[0] = x;
    sol.f[0] = rhs(x, 0.0);
    for (long long m = 0; m < steps; ++m) {
        const double t = static_cast<double>(m) * h;
        const Vec k1 = sol.f[m];
        const Vec k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
        const Vec k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
        const Vec k4 = rhs(x + h * k3, t + h);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite() || x.norm() > kDivergenceNorm)
            throw StepDiverged("solve_dagger: state diverged at t=" + std::to_string(t + h));
        sol.grid[m + 1] = static_cast<double>(m + 1) * h;
        sol.x[m + 1] = x;
        sol.f[m + 1] = rhs(x, sol.grid[m + 1]);
    }
    return sol;
}

void solve_fundamental(const ReactionNetwork& net, const ParamVector& theta,
                       OdeSolution& sol) {
    const int d = static_cast<int>(sol.x.front().size());
    const double h = sol.h;
    const std::size_t M = sol.size();
    sol.U.resize(M);
    sol.U_inv.resize(M);

    auto jac_at = [&](double t) { return net.jacobian(sol.value_at(t), theta, t); };

    Mat u = Mat::Identity(d, d);
    for (std::size_t m = 0; m < M; ++m) {
        if (m > 0) {
            const double t = sol.grid[m - 1];
            const Mat a0 = jac_at(t);
            const Mat am = jac_at(t + 0.5 * h);
            const Mat a1 = jac_at(t + h);
            const Mat k1 = a0 * u;
            const Mat k2 = am * (u + 0.5 * h * k1);
            const Mat k3 = am * (u + 0.5 * h * k2);
            const Mat k4 = a1 * (u + h * k3);
            u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        Eigen::PartialPivLU<Mat> lu(u);
        const double det = lu.determinant();
        if (!std::isfinite(det) || std::abs(det) <= kDetTol)
            throw SingularFundamental("fundamental matrix singular at t=" +
                                      std::to_string(sol.grid[m]));
        sol.U[m] = u;
        sol.U_inv[m] = lu.inverse();
    }
}

double quad_trapezoid(const std::vector<double>& values, double h,
                      std::size_t ia, std::size_t ib) {
    if (ib >= values.size() || ia > ib)
        throw DimensionMismatch("quad_trapezoid: bad index range");
    if (ia == ib) return 0.0;
    double acc = 0.5 * (values[ia] + values[ib]);
    for (std::size_t i = ia + 1; i < ib; ++i) acc += values[i];
    return acc * h;
}

}  // namespace popdyn
