#include "popdyn/study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "popdyn/det_model.hpp"
#include "popdyn/em_lattice.hpp"
#include "popdyn/fit.hpp"
#include "popdyn/rng.hpp"
#include "popdyn/simulate.hpp"

namespace popdyn {

std::vector<double> StudyConfig::obs_times() const {
    std::vector<double> out;
    for (double t = obs_spacing; t <= t_end + 1e-9; t += obs_spacing)
        out.push_back(t);
    return out;
}

std::vector<double> StudyConfig::pred_times() const {
    const std::vector<double> obs = obs_times();
    std::vector<double> out;
    for (double t = 1.0; t < t_end - 1e-9; t += 1.0) {
        const bool observed =
            std::any_of(obs.begin(), obs.end(),
                        [&](double o) { return std::abs(o - t) < 1e-9; });
        if (!observed) out.push_back(t);
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw Error("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double study_median_mape(const StudyReport& report, long long N,
                         const std::string& method) {
    std::vector<double> v;
    for (const StudyCell& c : report.cells)
        if (c.N == N && c.method == method && c.error.empty())
            v.push_back(c.mape);
    if (v.empty())
        throw Error("study_median_mape: no successful cells for N=" +
                    std::to_string(N) + " method=" + method);
    return median(v);
}

namespace {

double mean_abs_error_at(const std::vector<double>& pred_times,
                         const std::vector<double>& predicted_i,
                         const Trajectory& truth, int infected_class) {
    double total = 0.0;
    for (std::size_t k = 0; k < pred_times.size(); ++k) {
        double truth_val = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t j = 0; j < truth.times.size(); ++j)
            if (std::abs(truth.times[j] - pred_times[k]) < 1e-9)
                truth_val = truth.states[j][infected_class];
        if (!std::isfinite(truth_val))
            throw DimensionMismatch("study: truth missing a prediction time");
        total += std::abs(predicted_i[k] - truth_val);
    }
    return total / static_cast<double>(pred_times.size());
}

struct CellInputs {
    Trajectory truth;        // integer grid 0..t_end
    Trajectory obs;          // observation times only (no t=0)
    Trajectory obs_with_origin;  // plus the known initial state
    std::vector<double> pred_times;
};

CellInputs make_dataset(const ReactionNetwork& net, const StudyConfig& cfg,
                        long long N, std::uint64_t data_seed) {
    const ParamVector theta_true =
        ParamVector::sir(cfg.beta_true, cfg.gamma_true);
    Vec x0(2);
    x0 << cfg.s0, cfg.i0;

    SimConfig sim;
    sim.seed = data_seed;
    sim.t_end = cfg.t_end;
    sim.N = N;
    for (double t = 0.0; t <= cfg.t_end + 1e-9; t += 1.0)
        sim.record_times.push_back(t);

    CellInputs in;
    in.truth = gillespie_path(net, theta_true, x0, sim);
    in.pred_times = cfg.pred_times();
    for (const double t : cfg.obs_times()) {
        for (std::size_t j = 0; j < in.truth.times.size(); ++j) {
            if (std::abs(in.truth.times[j] - t) < 1e-9) {
                in.obs.times.push_back(t);
                in.obs.states.push_back(in.truth.states[j]);
            }
        }
    }
    in.obs.N = N;
    in.obs_with_origin.times.push_back(0.0);
    in.obs_with_origin.states.push_back(x0);
    in.obs_with_origin.times.insert(in.obs_with_origin.times.end(),
                                    in.obs.times.begin(), in.obs.times.end());
    in.obs_with_origin.states.insert(in.obs_with_origin.states.end(),
                                     in.obs.states.begin(),
                                     in.obs.states.end());
    in.obs_with_origin.N = N;
    return in;
}

constexpr int kInfectedClass = 1;  // SIR state is (S, I)

void run_jgdla_cell(const ReactionNetwork& net, const StudyConfig& cfg,
                    const CellInputs& in, long long N, StudyCell& cell) {
    Vec x0(2);
    x0 << cfg.s0, cfg.i0;
    const JgdlaFit fit = fit_jgdla_mle(net, ParamVector::sir(1.0, 1.0), x0,
                                       cfg.t_end, cfg.h, in.obs, N);
    OdeSolution ode = solve_dagger(net, fit.theta, x0, cfg.t_end, cfg.h);
    solve_fundamental(net, fit.theta, ode);
    const JgdlaPrediction pred =
        predict_conditional(ode, net, fit.theta, N, in.obs, in.pred_times);
    std::vector<double> pred_i(pred.pred_times.size());
    for (std::size_t k = 0; k < pred.pred_times.size(); ++k)
        pred_i[k] = pred.mean[static_cast<Eigen::Index>(2 * k) + kInfectedClass];
    cell.mape =
        mean_abs_error_at(pred.pred_times, pred_i, in.truth, kInfectedClass);
    cell.theta_hat = Vec(2);
    cell.theta_hat << fit.theta[0], fit.theta[1];
    cell.ci_low = fit.ci_low;
    cell.ci_high = fit.ci_high;
}

void run_ode_cell(const ReactionNetwork& net, const StudyConfig& cfg,
                  const CellInputs& in, StudyCell& cell,
                  ParamVector* theta_out) {
    Vec x0(2);
    x0 << cfg.s0, cfg.i0;
    const DetFit fit =
        fit_det_model(net, ParamVector::sir(1.0, 1.0), x0, in.obs, cfg.h);
    const OdeSolution ode =
        solve_dagger(net, fit.theta, x0, cfg.t_end, cfg.h);
    std::vector<double> pred_i(in.pred_times.size());
    for (std::size_t k = 0; k < in.pred_times.size(); ++k)
        pred_i[k] = ode.value_at(in.pred_times[k])[kInfectedClass];
    cell.mape =
        mean_abs_error_at(in.pred_times, pred_i, in.truth, kInfectedClass);
    cell.theta_hat = Vec(2);
    cell.theta_hat << fit.theta[0], fit.theta[1];
    cell.ci_low = fit.ci_low;
    cell.ci_high = fit.ci_high;
    if (theta_out) *theta_out = fit.theta;
}

void run_em_cell(const ReactionNetwork& net, const StudyConfig& cfg,
                 const CellInputs& in, long long N, EmVariant variant,
                 std::uint64_t chain_seed, const ParamVector& theta_init,
                 StudyCell& cell) {
    EmSamplerConfig sampler;
    sampler.variant = variant;
    sampler.mh.seed = chain_seed;
    sampler.mh.iterations = cfg.mh_iterations;
    sampler.mh.burn_in = cfg.mh_burn_in;
    const std::vector<Prior> priors{Prior::half_normal(1.0),
                                    Prior::half_normal(1.0)};
    const PosteriorChain chain =
        em_mh_sampler(net, in.obs_with_origin, N, cfg.lattice_dt, theta_init,
                      priors, sampler);
    const EmLattice layout =
        em_sampler_lattice(net, in.obs_with_origin, cfg.lattice_dt);
    cell.mape =
        em_mape(chain, layout, kInfectedClass, in.truth, in.pred_times);
    cell.theta_hat = chain.posterior_mean().head(2);
    cell.ci_low = Vec(2);
    cell.ci_high = Vec(2);
    for (int j = 0; j < 2; ++j) {
        cell.ci_low[j] = chain.quantile(j, 0.025);
        cell.ci_high[j] = chain.quantile(j, 0.975);
    }
    cell.acceptance_rate = chain.acceptance_rate;
}

}  // namespace

StudyReport run_sir_study(const StudyConfig& cfg) {
    StudyReport report;
    report.cfg = cfg;
    const ReactionNetwork net = build_sir();

    for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
        const long long N = cfg.n_grid[ni];
        for (int s = 0; s < cfg.n_seeds; ++s) {
            const std::uint64_t data_seed = derive_seed(
                cfg.master_seed, ni * 10000 + static_cast<std::uint64_t>(s));
            CellInputs in;
            std::string data_error;
            try {
                in = make_dataset(net, cfg, N, data_seed);
            } catch (const std::exception& e) {
                data_error = e.what();
            }

            // ODE estimate doubles as the start point for the EM chains.
            ParamVector em_init = ParamVector::sir(1.0, 1.0);
            for (const std::string& method : cfg.methods) {
                StudyCell cell;
                cell.method = method;
                cell.N = N;
                cell.seed_index = s;
                cell.seed = data_seed;
                if (!data_error.empty()) {
                    cell.error = "dataset: " + data_error;
                    report.cells.push_back(std::move(cell));
                    continue;
                }
                try {
                    if (method == "jgdla") {
                        run_jgdla_cell(net, cfg, in, N, cell);
                    } else if (method == "ode") {
                        run_ode_cell(net, cfg, in, cell, &em_init);
                    } else if (method == "em") {
                        run_em_cell(net, cfg, in, N, EmVariant::full,
                                    derive_seed(data_seed, 1), em_init, cell);
                    } else if (method == "em-ind") {
                        run_em_cell(net, cfg, in, N, EmVariant::independent,
                                    derive_seed(data_seed, 2), em_init, cell);
                    } else {
                        cell.error = "unknown method '" + method + "'";
                    }
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                report.cells.push_back(std::move(cell));
            }
        }
    }
    return report;
}

namespace {

nlohmann::json vec_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

}  // namespace

nlohmann::json study_report_json(const StudyReport& report) {
    const StudyConfig& cfg = report.cfg;
    nlohmann::json root;
    root["kind"] = "sir-study";
    root["theta_true"] = {cfg.beta_true, cfg.gamma_true};
    root["x0"] = {cfg.s0, cfg.i0};
    root["n_seeds"] = cfg.n_seeds;
    root["master_seed"] = cfg.master_seed;
    root["obs_times"] = cfg.obs_times();
    root["pred_times"] = cfg.pred_times();
    root["mh_iterations"] = cfg.mh_iterations;
    root["mh_burn_in"] = cfg.mh_burn_in;

    nlohmann::json results = nlohmann::json::array();
    for (const long long N : cfg.n_grid) {
        for (const std::string& method : cfg.methods) {
            nlohmann::json group;
            group["N"] = N;
            group["method"] = method;
            nlohmann::json cells = nlohmann::json::array();
            std::vector<double> mapes;
            int covered = 0, ok = 0;
            for (const StudyCell& c : report.cells) {
                if (c.N != N || c.method != method) continue;
                nlohmann::json jc;
                jc["method"] = c.method;
                jc["N"] = c.N;
                jc["seed"] = c.seed;
                if (c.error.empty()) {
                    jc["mape"] = c.mape;
                    jc["theta_hat"] = vec_json(c.theta_hat);
                    jc["ci_low"] = vec_json(c.ci_low);
                    jc["ci_high"] = vec_json(c.ci_high);
                    jc["error"] = nullptr;
                    mapes.push_back(c.mape);
                    ++ok;
                    const bool cov =
                        c.ci_low[0] <= cfg.beta_true &&
                        cfg.beta_true <= c.ci_high[0] &&
                        c.ci_low[1] <= cfg.gamma_true &&
                        cfg.gamma_true <= c.ci_high[1];
                    covered += cov ? 1 : 0;
                } else {
                    jc["mape"] = nullptr;
                    jc["theta_hat"] = nullptr;
                    jc["ci_low"] = nullptr;
                    jc["ci_high"] = nullptr;
                    jc["error"] = c.error;
                }
                if (c.acceptance_rate >= 0.0)
                    jc["acceptance_rate"] = c.acceptance_rate;
                cells.push_back(std::move(jc));
            }
            group["cells"] = std::move(cells);
            group["n_ok"] = ok;
            if (!mapes.empty()) {
                group["median_mape"] = median(mapes);
                group["coverage"] =
                    static_cast<double>(covered) / static_cast<double>(ok);
            } else {
                group["median_mape"] = nullptr;
                group["coverage"] = nullptr;
            }
            results.push_back(std::move(group));
        }
    }
    root["results"] = std::move(results);
    return root;
}

CovidReport run_covid(const CovidRunConfig& cfg) {
    CovidReport report;
    report.cfg = cfg;

    SeirSamplerConfig sampler;
    sampler.mh.seed = cfg.seed;
    sampler.mh.iterations = cfg.iterations;
    sampler.mh.burn_in = cfg.burn_in;
    sampler.mh.tune = cfg.tune;
    sampler.L = cfg.L;
    sampler.h = cfg.h;
    sampler.mc_seed = derive_seed(cfg.seed, 999);

    const std::vector<BinomialObservation> data = covid_observations();
    report.result = seir_mh_sampler(data, sampler);

    const PosteriorChain& chain = report.result.chain;
    report.posterior_mean = chain.posterior_mean();
    report.q025 = Vec(5);
    report.q975 = Vec(5);
    for (int j = 0; j < 5; ++j) {
        report.q025[j] = chain.quantile(j, 0.025);
        report.q975[j] = chain.quantile(j, 0.975);
    }

    const ParamVector theta = ParamVector::seir(report.posterior_mean[0],
                                                report.posterior_mean[1],
                                                report.posterior_mean[2]);
    report.p_curve =
        seir_p_curve(theta, report.posterior_mean[3], report.posterior_mean[4],
                     data.back().t, cfg.h, report.p_curve_dt);

    double mad = 0.0;
    for (const BinomialObservation& b : data) {
        double p_model = 0.0;
        for (const auto& [t, p] : report.p_curve)
            if (std::abs(t - b.t) < 1e-9) p_model = p;
        mad += std::abs(p_model - static_cast<double>(b.y) /
                                      static_cast<double>(b.n));
    }
    report.empirical_mean_abs_dev = mad / static_cast<double>(data.size());
    return report;
}

nlohmann::json covid_report_json(const CovidReport& report) {
    static const char* names[5] = {"beta", "alpha", "gamma", "S0", "I0"};
    nlohmann::json root;
    root["kind"] = "covid";
    root["method"] = "seir-jgdla-mc";
    root["N"] = kCovidPopulation;
    root["seed"] = report.cfg.seed;
    root["iterations"] = report.cfg.iterations;
    root["burn_in"] = report.cfg.burn_in;
    root["L"] = report.cfg.L;
    root["acceptance_rate"] = report.result.chain.acceptance_rate;
    root["clamp_events"] = report.result.clamp_events;
    root["degenerate_evals"] = report.result.degenerate_evals;
    root["mape"] = nullptr;
    root["theta_hat"] = vec_json(report.posterior_mean);
    root["ci_low"] = vec_json(report.q025);
    root["ci_high"] = vec_json(report.q975);
    nlohmann::json post;
    for (int j = 0; j < 5; ++j) {
        post[names[j]] = {{"mean", report.posterior_mean[j]},
                          {"q025", report.q025[j]},
                          {"q975", report.q975[j]}};
    }
    root["posterior"] = std::move(post);
    root["p_curve_dt"] = report.p_curve_dt;
    root["empirical_mean_abs_dev"] = report.empirical_mean_abs_dev;

    nlohmann::json days = nlohmann::json::array();
    for (const CovidRow& r : diamond_princess_rows()) {
        nlohmann::json jr;
        jr["day"] = r.day;
        if (r.has_obs) {
            jr["n"] = r.n;
            jr["y"] = r.y;
        } else {
            jr["n"] = nullptr;
            jr["y"] = nullptr;
        }
        jr["on_ship"] = r.on_ship;
        days.push_back(std::move(jr));
    }
    root["data"] = std::move(days);
    return root;
}

}  // namespace popdyn
