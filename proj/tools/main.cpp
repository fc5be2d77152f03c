// popdyn command line: simulation, fitting, prediction, and the two study
// pipelines. All outputs are deterministic under --seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "popdyn/config.hpp"
#include "popdyn/csv.hpp"
#include "popdyn/det_model.hpp"
#include "popdyn/em_lattice.hpp"
#include "popdyn/errors.hpp"
#include "popdyn/fit.hpp"
#include "popdyn/jgdla.hpp"
#include "popdyn/model.hpp"
#include "popdyn/simulate.hpp"
#include "popdyn/study.hpp"
#include "popdyn/util.hpp"

namespace {

namespace fs = std::filesystem;
using popdyn::Config;
using popdyn::ConfigError;
using popdyn::ParamVector;
using popdyn::ReactionNetwork;
using popdyn::Trajectory;
using popdyn::Vec;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::string method;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file path");
    cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--method", args.method, "method override");
    cmd->add_flag("--quiet", args.quiet, "suppress progress notes");
}

Config load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return Config::parse_text("", "<empty>");
    return Config::parse_file(args.config_path);
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    fs::create_directories(args.out_dir);
    return (fs::path(args.out_dir) / name).string();
}

void note(const CommonArgs& args, const std::string& text) {
    if (!args.quiet) std::cout << text << "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw popdyn::Error("cannot write file: " + path);
    out << text << "\n";
}

std::string trimmed(const std::string& s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trimmed(cell));
    return out;
}

struct ModelSpec {
    ReactionNetwork net;
    ParamVector theta;
    std::vector<std::string> class_names;
};

// model = sir | seir | custom (with model_file); theta values come from the
// per-model keys or a `theta` list for custom files.
ModelSpec load_model(const Config& cfg) {
    const std::string model = cfg.get_string("model", "sir");
    if (model == "sir") {
        return {popdyn::build_sir(),
                ParamVector::sir(cfg.get_double("beta", 0.5),
                                 cfg.get_double("gamma", 0.15)),
                {"S", "I"}};
    }
    if (model == "seir") {
        return {popdyn::build_seir(popdyn::covid_mu_s()),
                ParamVector::seir(cfg.get_double("beta", 3.0),
                                  cfg.get_double("alpha", 0.5),
                                  cfg.get_double("gamma", 0.9)),
                {"S", "E", "I"}};
    }
    if (model == "custom") {
        const Config mc = Config::parse_file(cfg.get_string("model_file"));
        const std::vector<std::string> classes =
            split_list(mc.get_string("classes"));
        const std::vector<std::string> params =
            split_list(mc.get_string("params"));
        const int d = static_cast<int>(classes.size());
        const long long n = mc.get_int("reactions");
        std::vector<popdyn::StoichVec> stoich;
        std::vector<int> param_index;
        std::vector<Eigen::VectorXi> exponents;
        for (long long i = 1; i <= n; ++i) {
            const std::string row = mc.get_string("reaction_" + std::to_string(i));
            // stoich | param | exponents
            const auto p1 = row.find('|');
            const auto p2 = row.find('|', p1 + 1);
            if (p1 == std::string::npos || p2 == std::string::npos)
                throw ConfigError("reaction_" + std::to_string(i) +
                                  ": expected 'stoich | param | exponents'");
            const auto parse_ints = [&](const std::string& text) {
                Eigen::VectorXi v(d);
                std::stringstream ss(text);
                std::string cell;
                int j = 0;
                while (std::getline(ss, cell, ',')) {
                    if (j >= d)
                        throw ConfigError("reaction_" + std::to_string(i) +
                                          ": too many entries");
                    v[j++] = std::stoi(cell);
                }
                if (j != d)
                    throw ConfigError("reaction_" + std::to_string(i) +
                                      ": expected " + std::to_string(d) +
                                      " entries");
                return v;
            };
            stoich.push_back(parse_ints(row.substr(0, p1)));
            const std::string pname = trimmed(row.substr(p1 + 1, p2 - p1 - 1));
            const auto it = std::find(params.begin(), params.end(), pname);
            if (it == params.end())
                throw ConfigError("reaction_" + std::to_string(i) +
                                  ": unknown parameter '" + pname + "'");
            param_index.push_back(static_cast<int>(it - params.begin()));
            exponents.push_back(parse_ints(row.substr(p2 + 1)));
        }
        const std::vector<double> theta_vals = cfg.get_double_list("theta");
        if (theta_vals.size() != params.size())
            throw ConfigError("theta: expected " +
                              std::to_string(params.size()) + " values");
        ParamVector theta;
        for (std::size_t j = 0; j < params.size(); ++j)
            theta.set(params[j], theta_vals[j]);
        return {popdyn::build_mass_action(classes, stoich, param_index,
                                          exponents),
                theta, classes};
    }
    throw ConfigError("model: expected sir, seir, or custom, got '" + model +
                      "'");
}

Vec vec_from_list(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

nlohmann::json vec_json(const Vec& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

int cmd_simulate(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const ModelSpec model = load_model(cfg);

    popdyn::SimConfig sim;
    sim.seed = args.seed.value_or(cfg.get_u64("seed", 1));
    sim.t_end = cfg.get_double("t_end", 30.0);
    sim.N = cfg.get_int("N", 1000);
    const double record_dt = cfg.get_double("record_dt", 1.0);
    if (cfg.has("record_times")) {
        sim.record_times = cfg.get_double_list("record_times");
    } else if (record_dt > 0.0) {
        for (double t = 0.0; t <= sim.t_end + 1e-9; t += record_dt)
            sim.record_times.push_back(std::min(t, sim.t_end));
    }
    const Vec x0 = vec_from_list(
        cfg.get_double_list("x0", std::vector<double>{0.95, 0.05}));
    if (x0.size() != model.net.dim())
        throw ConfigError("x0: expected " + std::to_string(model.net.dim()) +
                          " entries");

    const std::string method =
        !args.method.empty() ? args.method : cfg.get_string("method", "gillespie");
    Trajectory traj;
    if (method == "gillespie") {
        traj = popdyn::gillespie_path(model.net, model.theta, x0, sim);
    } else if (method == "em") {
        traj = popdyn::em_path(model.net, model.theta, x0,
                               cfg.get_double("em_dt", 0.01), sim)
                   .trajectory;
    } else {
        throw ConfigError("method: expected gillespie or em, got '" + method +
                          "'");
    }
    const std::string path = out_path(args, "trajectory.csv");
    popdyn::write_trajectory_csv(path, traj, model.class_names);
    note(args, "wrote " + path);
    return 0;
}

// Splits a data file into the known initial state (t=0 row) and the
// observation rows used for fitting.
struct FitData {
    Vec x0;
    Trajectory obs;
};

FitData load_fit_data(const Config& cfg, const ModelSpec& model) {
    const popdyn::TrajectoryCsv raw =
        popdyn::read_trajectory_csv(cfg.get_string("data"));
    const Trajectory full = popdyn::reorder_classes(raw, model.class_names);
    FitData out;
    std::size_t start = 0;
    if (std::abs(full.times.front()) < 1e-9) {
        out.x0 = full.states.front();
        start = 1;
    } else {
        out.x0 = vec_from_list(cfg.get_double_list("x0"));
    }
    for (std::size_t i = start; i < full.times.size(); ++i) {
        out.obs.times.push_back(full.times[i]);
        out.obs.states.push_back(full.states[i]);
    }
    if (out.obs.times.empty()) throw ConfigError("data: no observation rows");
    return out;
}

int cmd_fit(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const ModelSpec model = load_model(cfg);
    const FitData data = load_fit_data(cfg, model);
    const long long N = cfg.get_int("N");
    const double h = cfg.get_double("h", 0.01);
    const double t_end = cfg.get_double("t_end", data.obs.times.back());
    const std::uint64_t seed = args.seed.value_or(cfg.get_u64("seed", 1));
    const std::string method =
        !args.method.empty() ? args.method : cfg.get_string("method", "jgdla");
    std::vector<double> pred_times;
    if (cfg.has("pred_times")) pred_times = cfg.get_double_list("pred_times");

    nlohmann::json summary;
    summary["kind"] = "fit";
    summary["method"] = method;
    summary["N"] = N;
    summary["seed"] = seed;
    summary["mape"] = nullptr;

    const int d = model.net.dim();
    if (method == "jgdla") {
        const popdyn::JgdlaFit fit = popdyn::fit_jgdla_mle(
            model.net, model.theta, data.x0, t_end, h, data.obs, N);
        Vec that(fit.theta.size());
        for (int j = 0; j < fit.theta.size(); ++j) that[j] = fit.theta[j];
        summary["theta_hat"] = vec_json(that);
        summary["ci_low"] = vec_json(fit.ci_low);
        summary["ci_high"] = vec_json(fit.ci_high);
        summary["loglik"] = fit.loglik;
        summary["converged"] = fit.converged;
        summary["jitter"] = fit.dist.jitter;

        std::vector<double> artifact_times = data.obs.times;
        artifact_times.insert(artifact_times.end(), pred_times.begin(),
                              pred_times.end());
        std::sort(artifact_times.begin(), artifact_times.end());
        const popdyn::JgdlaDistribution joint = popdyn::jgdla_build(
            model.net, fit.theta, data.x0, t_end, h, artifact_times, N);
        const std::string apath = out_path(args, "artifact.json");
        write_text(apath, popdyn::jgdla_serialize(joint));
        note(args, "wrote " + apath);

        if (!pred_times.empty()) {
            const popdyn::JgdlaPrediction pred =
                popdyn::condition_on_observations(joint, data.obs);
            Trajectory ptraj;
            ptraj.times = pred.pred_times;
            for (std::size_t k = 0; k < pred.pred_times.size(); ++k)
                ptraj.states.push_back(
                    pred.mean.segment(static_cast<Eigen::Index>(d) * k, d));
            const std::string ppath = out_path(args, "prediction.csv");
            popdyn::write_trajectory_csv(ppath, ptraj, model.class_names);
            note(args, "wrote " + ppath);
        }
    } else if (method == "ode") {
        const popdyn::DetFit fit = popdyn::fit_det_model(
            model.net, model.theta, data.x0, data.obs, h);
        Vec that(fit.theta.size());
        for (int j = 0; j < fit.theta.size(); ++j) that[j] = fit.theta[j];
        summary["theta_hat"] = vec_json(that);
        summary["ci_low"] = vec_json(fit.ci_low);
        summary["ci_high"] = vec_json(fit.ci_high);
        summary["loglik"] = fit.loglik;
        summary["sigma"] = fit.sigma;
        summary["converged"] = fit.converged;
        if (!pred_times.empty()) {
            const popdyn::OdeSolution ode = popdyn::solve_dagger(
                model.net, fit.theta, data.x0, t_end, h);
            Trajectory ptraj;
            for (double t : pred_times) {
                ptraj.times.push_back(t);
                ptraj.states.push_back(ode.value_at(t));
            }
            const std::string ppath = out_path(args, "prediction.csv");
            popdyn::write_trajectory_csv(ppath, ptraj, model.class_names);
            note(args, "wrote " + ppath);
        }
    } else if (method == "em" || method == "em-ind") {
        Trajectory with_origin;
        with_origin.times.push_back(0.0);
        with_origin.states.push_back(data.x0);
        with_origin.times.insert(with_origin.times.end(),
                                 data.obs.times.begin(), data.obs.times.end());
        with_origin.states.insert(with_origin.states.end(),
                                  data.obs.states.begin(),
                                  data.obs.states.end());

        popdyn::EmSamplerConfig sampler;
        sampler.variant = method == "em" ? popdyn::EmVariant::full
                                         : popdyn::EmVariant::independent;
        sampler.mh.seed = seed;
        sampler.mh.iterations =
            static_cast<int>(cfg.get_int("mh_iterations", 30000));
        sampler.mh.burn_in = static_cast<int>(cfg.get_int("mh_burn_in", 10000));
        const double dt = cfg.get_double("lattice_dt", 1.0);
        std::vector<popdyn::Prior> priors;
        for (int j = 0; j < model.theta.size(); ++j)
            priors.push_back(popdyn::Prior::half_normal(1.0));
        const popdyn::PosteriorChain chain = popdyn::em_mh_sampler(
            model.net, with_origin, N, dt, model.theta, priors, sampler);

        const int p = model.theta.size();
        const Vec mean = chain.posterior_mean();
        summary["theta_hat"] = vec_json(mean.head(p));
        Vec lo(p), hi(p);
        for (int j = 0; j < p; ++j) {
            lo[j] = chain.quantile(j, 0.025);
            hi[j] = chain.quantile(j, 0.975);
        }
        summary["ci_low"] = vec_json(lo);
        summary["ci_high"] = vec_json(hi);
        summary["acceptance_rate"] = chain.acceptance_rate;
        const std::string cpath = out_path(args, "chain.csv");
        popdyn::write_chain_csv(cpath, chain);
        note(args, "wrote " + cpath);
    } else {
        throw ConfigError("method: expected jgdla, em, em-ind, or ode, got '" +
                          method + "'");
    }

    const std::string spath = out_path(args, "summary.json");
    write_text(spath, summary.dump(2));
    note(args, "wrote " + spath);
    return 0;
}

int cmd_predict(const CommonArgs& args) {
    const Config cfg = load_config(args);
    std::ifstream in(cfg.get_string("artifact"));
    if (!in)
        throw ConfigError("artifact: cannot open '" +
                          cfg.get_string("artifact") + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const popdyn::JgdlaDistribution joint = popdyn::jgdla_deserialize(ss.str());
    std::vector<std::string> classes = joint.class_names;
    if (classes.empty()) {
        // Artifact predates class names; fall back to the configured model.
        classes = load_model(cfg).class_names;
    }

    const popdyn::TrajectoryCsv raw =
        popdyn::read_trajectory_csv(cfg.get_string("data"));
    popdyn::TrajectoryCsv obs_csv = raw;
    const Trajectory obs = popdyn::reorder_classes(obs_csv, classes);

    const popdyn::JgdlaPrediction pred =
        popdyn::condition_on_observations(joint, obs);
    const int d = static_cast<int>(classes.size());
    Trajectory mean_traj, sd_traj;
    for (std::size_t k = 0; k < pred.pred_times.size(); ++k) {
        mean_traj.times.push_back(pred.pred_times[k]);
        sd_traj.times.push_back(pred.pred_times[k]);
        mean_traj.states.push_back(
            pred.mean.segment(static_cast<Eigen::Index>(d) * k, d));
        Vec sd(d);
        for (int j = 0; j < d; ++j) {
            const Eigen::Index i = static_cast<Eigen::Index>(d) * k + j;
            sd[j] = std::sqrt(std::max(0.0, pred.cov(i, i)));
        }
        sd_traj.states.push_back(sd);
    }
    const std::string mpath = out_path(args, "prediction.csv");
    popdyn::write_trajectory_csv(mpath, mean_traj, classes);
    note(args, "wrote " + mpath);
    const std::string spath = out_path(args, "prediction_sd.csv");
    popdyn::write_trajectory_csv(spath, sd_traj, classes);
    note(args, "wrote " + spath);
    return 0;
}

int cmd_evaluate(const CommonArgs& args) {
    const Config cfg = load_config(args);
    const popdyn::TrajectoryCsv pred =
        popdyn::read_trajectory_csv(cfg.get_string("prediction"));
    const popdyn::TrajectoryCsv truth =
        popdyn::read_trajectory_csv(cfg.get_string("truth"));
    const std::string cls = cfg.get_string("class", "I");

    const auto find_class = [&](const popdyn::TrajectoryCsv& t) {
        const auto it =
            std::find(t.class_names.begin(), t.class_names.end(), cls);
        if (it == t.class_names.end())
            throw ConfigError("class '" + cls + "' not present in data");
        return static_cast<Eigen::Index>(it - t.class_names.begin());
    };
    const Eigen::Index cp = find_class(pred);
    const Eigen::Index ct = find_class(truth);

    double total = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < pred.trajectory.times.size(); ++i) {
        const double t = pred.trajectory.times[i];
        bool found = false;
        for (std::size_t j = 0; j < truth.trajectory.times.size(); ++j) {
            if (std::abs(truth.trajectory.times[j] - t) < 1e-9) {
                total += std::abs(pred.trajectory.states[i][cp] -
                                  truth.trajectory.states[j][ct]);
                found = true;
                ++n;
                break;
            }
        }
        if (!found)
            throw popdyn::DimensionMismatch(
                "evaluate: truth lacks prediction time " + std::to_string(t));
    }

    nlohmann::json out;
    out["kind"] = "evaluation";
    out["class"] = cls;
    out["n_times"] = n;
    out["mape"] = total / static_cast<double>(n);
    const std::string path = out_path(args, "evaluation.json");
    write_text(path, out.dump(2));
    note(args, "wrote " + path);
    return 0;
}

int cmd_covid(const CommonArgs& args) {
    const Config cfg = load_config(args);
    popdyn::CovidRunConfig run;
    run.seed = args.seed.value_or(cfg.get_u64("seed", 1));
    run.iterations = static_cast<int>(cfg.get_int("iterations", 20000));
    run.burn_in = static_cast<int>(cfg.get_int("burn_in", 2000));
    run.L = static_cast<int>(cfg.get_int("L", 1000));
    run.h = cfg.get_double("h", 0.01);
    run.tune = cfg.get_bool("tune", true);

    const popdyn::CovidReport report = popdyn::run_covid(run);
    const std::string spath = out_path(args, "covid_summary.json");
    write_text(spath, popdyn::covid_report_json(report).dump(2));
    note(args, "wrote " + spath);

    const std::string cpath = out_path(args, "covid_chain.csv");
    popdyn::write_chain_csv(cpath, report.result.chain);
    note(args, "wrote " + cpath);

    std::ofstream curve(out_path(args, "p_curve.csv"));
    curve << "t,p\n";
    for (const auto& [t, p] : report.p_curve)
        curve << popdyn::format_full(t) << "," << popdyn::format_full(p)
              << "\n";
    note(args, "wrote " + out_path(args, "p_curve.csv"));
    return 0;
}

int cmd_study(const CommonArgs& args) {
    const Config cfg = load_config(args);
    popdyn::StudyConfig study;
    study.master_seed = args.seed.value_or(cfg.get_u64("seed", 1));
    if (cfg.has("n_grid")) {
        study.n_grid.clear();
        for (double v : cfg.get_double_list("n_grid"))
            study.n_grid.push_back(static_cast<long long>(v));
    }
    study.n_seeds = static_cast<int>(cfg.get_int("n_seeds", 20));
    if (cfg.has("methods") || !args.method.empty())
        study.methods = split_list(!args.method.empty()
                                       ? args.method
                                       : cfg.get_string("methods"));
    study.mh_iterations =
        static_cast<int>(cfg.get_int("mh_iterations", 30000));
    study.mh_burn_in = static_cast<int>(cfg.get_int("mh_burn_in", 10000));
    study.h = cfg.get_double("h", 0.01);
    study.beta_true = cfg.get_double("beta", 0.5);
    study.gamma_true = cfg.get_double("gamma", 0.15);

    const popdyn::StudyReport report = popdyn::run_sir_study(study);
    const std::string path = out_path(args, "study_report.json");
    write_text(path, popdyn::study_report_json(report).dump(2));
    note(args, "wrote " + path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov population model simulation and inference"};
    app.require_subcommand(1);

    CommonArgs args[6];
    CLI::App* sub[6];
    sub[0] = app.add_subcommand("simulate", "generate a dataset");
    sub[1] = app.add_subcommand("fit", "fit a model to data");
    sub[2] = app.add_subcommand("predict", "conditional infill from an artifact");
    sub[3] = app.add_subcommand("evaluate", "prediction error against truth");
    sub[4] = app.add_subcommand("covid", "cruise-ship outbreak analysis");
    sub[5] = app.add_subcommand("study", "simulation study over population sizes");
    for (int i = 0; i < 6; ++i) add_common(sub[i], args[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    int (*handlers[6])(const CommonArgs&) = {cmd_simulate, cmd_fit,
                                             cmd_predict,  cmd_evaluate,
                                             cmd_covid,    cmd_study};
    try {
        for (int i = 0; i < 6; ++i)
            if (sub[i]->parsed()) return handlers[i](args[i]);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const popdyn::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
