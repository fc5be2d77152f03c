#include "popdyn/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace popdyn {

namespace {

double guarded(const std::function<double(const Vec&)>& fn, const Vec& x) {
    const double v = fn(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

struct RunResult {
    Vec x;
    double value;
    int iterations;
    bool converged;
};

RunResult run_once(const std::function<double(const Vec&)>& fn, const Vec& x0,
                   const NelderMeadOptions& o) {
    const int d = static_cast<int>(x0.size());
    std::vector<Vec> vx(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (int j = 0; j < d; ++j) {
        const double off = x0[j] != 0.0 ? o.initial_step * std::abs(x0[j])
                                        : o.initial_step;
        vx[j + 1][j] += off;
    }
    for (int i = 0; i <= d; ++i) fv[i] = guarded(fn, vx[i]);

    std::vector<int> order(d + 1);
    int iter = 0;
    for (; iter < o.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fv[a] < fv[b]; });
        const int best = order[0], worst = order[d], second = order[d - 1];

        double diameter = 0.0;
        for (int i = 0; i <= d; ++i)
            diameter = std::max(diameter, (vx[i] - vx[best]).norm());
        const double spread = fv[worst] - fv[best];
        if (diameter < o.diameter_tol || spread < o.spread_tol)
            return {vx[best], fv[best], iter, true};

        Vec centroid = Vec::Zero(d);
        for (int i = 0; i <= d; ++i)
            if (i != worst) centroid += vx[i];
        centroid /= static_cast<double>(d);

        const Vec xr = centroid + o.reflect * (centroid - vx[worst]);
        const double fr = guarded(fn, xr);
        if (fr < fv[best]) {
            const Vec xe = centroid + o.expand * (xr - centroid);
            const double fe = guarded(fn, xe);
            if (fe < fr) {
                vx[worst] = xe;
                fv[worst] = fe;
            } else {
                vx[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            vx[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        const Vec& pivot = outside ? xr : vx[worst];
        const Vec xc = centroid + o.contract * (pivot - centroid);
        const double fc = guarded(fn, xc);
        if (fc < (outside ? fr : fv[worst])) {
            vx[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (int i = 0; i <= d; ++i) {
            if (i == best) continue;
            vx[i] = vx[best] + o.shrink * (vx[i] - vx[best]);
            fv[i] = guarded(fn, vx[i]);
        }
    }
    const int best = static_cast<int>(
        std::min_element(fv.begin(), fv.end()) - fv.begin());
    return {vx[best], fv[best], iter, false};
}

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Vec&)>& fn,
                             const Vec& x0, const NelderMeadOptions& opts) {
    RunResult r = run_once(fn, x0, opts);
    int total_iter = r.iterations;
    for (int k = 0; k < opts.restarts; ++k) {
        RunResult r2 = run_once(fn, r.x, opts);
        total_iter += r2.iterations;
        if (r2.value <= r.value) r = r2;
        r.iterations = total_iter;
    }
    NelderMeadResult out;
    out.x = r.x;
    out.value = r.value;
    out.iterations = total_iter;
    out.converged = r.converged;
    return out;
}

}  // namespace popdyn
