#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "popdyn/seir_covid.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

// SIR simulation study over an N grid: per seed, one Gillespie dataset
// fitted by every requested method, with prediction error at infill times.
struct StudyConfig {
    std::vector<long long> n_grid{100, 300, 500, 1000};
    int n_seeds = 20;
    std::uint64_t master_seed = 1;
    std::vector<std::string> methods{"jgdla", "em", "em-ind", "ode"};
    double beta_true = 0.5;
    double gamma_true = 0.15;
    double s0 = 0.95;
    double i0 = 0.05;
    double t_end = 30.0;
    double obs_spacing = 5.0;   // observation every 5 time units after 0
    double h = 0.01;
    double lattice_dt = 1.0;
    int mh_iterations = 30000;
    int mh_burn_in = 10000;

    std::vector<double> obs_times() const;   // {5,10,...,t_end}
    std::vector<double> pred_times() const;  // integer infill times
};

struct StudyCell {
    std::string method;
    long long N = 0;
    int seed_index = 0;
    std::uint64_t seed = 0;       // dataset seed, shared across methods
    double mape = 0.0;
    Vec theta_hat;
    Vec ci_low;
    Vec ci_high;
    double acceptance_rate = -1.0;  // MCMC methods only
    std::string error;              // empty on success
};

struct StudyReport {
    StudyConfig cfg;
    std::vector<StudyCell> cells;
};

StudyReport run_sir_study(const StudyConfig& cfg);

double median(std::vector<double> values);

// Median MAPE over successful cells for one (N, method) pair; throws when
// every cell failed.
double study_median_mape(const StudyReport& report, long long N,
                         const std::string& method);

nlohmann::json study_report_json(const StudyReport& report);

// COVID analysis runner: embedded dataset, SEIR sampler, posterior summary.
struct CovidRunConfig {
    std::uint64_t seed = 1;
    int iterations = 20000;
    int burn_in = 2000;
    int L = 1000;
    double h = 0.01;
    bool tune = true;
};

struct CovidReport {
    CovidRunConfig cfg;
    SeirChainResult result;
    Vec posterior_mean;  // (beta, alpha, gamma, S0, I0)
    Vec q025;
    Vec q975;
    std::vector<std::pair<double, double>> p_curve;  // at the posterior mean
    double p_curve_dt = 0.1;
    double empirical_mean_abs_dev = 0.0;  // P(t) vs y/n over observed days
};

CovidReport run_covid(const CovidRunConfig& cfg);

nlohmann::json covid_report_json(const CovidReport& report);

}  // namespace popdyn
