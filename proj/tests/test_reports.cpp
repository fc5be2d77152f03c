#include <doctest.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "popdyn/study.hpp"

using namespace popdyn;

TEST_CASE("median of odd, even, and single-element samples") {
    CHECK(median({3.0}) == 3.0);
    CHECK(median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), Error);
}

TEST_CASE("study grids expand to the documented time sets") {
    StudyConfig cfg;
    CHECK(cfg.obs_times() ==
          std::vector<double>{5.0, 10.0, 15.0, 20.0, 25.0, 30.0});
    const std::vector<double> pred = cfg.pred_times();
    REQUIRE(pred.size() == 24);
    CHECK(pred.front() == 1.0);
    CHECK(pred.back() == 29.0);
    for (double t : pred) {
        for (double o : cfg.obs_times()) CHECK(t != o);
    }
}

TEST_CASE("a small study fills every cell and serializes reproducibly") {
    StudyConfig cfg;
    cfg.n_grid = {100};
    cfg.n_seeds = 2;
    cfg.master_seed = 11;
    cfg.methods = {"jgdla", "ode"};
    const StudyReport report = run_sir_study(cfg);

    REQUIRE(report.cells.size() == 4);
    for (const StudyCell& cell : report.cells) {
        INFO("method ", cell.method, " seed ", cell.seed_index, ": ",
             cell.error);
        CHECK(cell.error.empty());
        CHECK(cell.N == 100);
        CHECK(cell.mape > 0.0);
        CHECK(cell.mape < 0.5);
        REQUIRE(cell.theta_hat.size() == 2);
        CHECK(cell.theta_hat[0] > 0.0);
        CHECK(cell.theta_hat[1] > 0.0);
        CHECK(cell.ci_low[0] < cell.theta_hat[0]);
        CHECK(cell.ci_high[0] > cell.theta_hat[0]);
        CHECK(cell.acceptance_rate == -1.0);
    }
    // Both methods saw the same dataset per seed.
    CHECK(report.cells[0].seed == report.cells[1].seed);
    CHECK(report.cells[0].seed != report.cells[2].seed);

    CHECK(study_median_mape(report, 100, "jgdla") > 0.0);
    CHECK_THROWS_AS(study_median_mape(report, 100, "em"), Error);

    const nlohmann::json j = study_report_json(report);
    CHECK(j.at("kind") == "sir-study");
    CHECK(j.at("n_seeds") == 2);
    CHECK(j.at("results").size() == 2);
    for (const auto& group : j.at("results")) {
        CHECK(group.at("N") == 100);
        CHECK(group.contains("median_mape"));
        CHECK(group.contains("coverage"));
        CHECK(group.at("n_ok") == 2);
        for (const auto& cell : group.at("cells")) {
            CHECK(cell.contains("mape"));
            CHECK(cell.contains("theta_hat"));
            CHECK(cell.contains("ci_low"));
            CHECK(cell.contains("ci_high"));
            CHECK_FALSE(cell.contains("acceptance_rate"));
            CHECK(cell.at("error").is_null());
        }
    }

    const StudyReport rerun = run_sir_study(cfg);
    CHECK(study_report_json(rerun).dump() == j.dump());
}

TEST_CASE("sampler-based study cells report their acceptance rate") {
    StudyConfig cfg;
    cfg.n_grid = {100};
    cfg.n_seeds = 1;
    cfg.master_seed = 5;
    cfg.methods = {"em"};
    cfg.mh_iterations = 1200;
    cfg.mh_burn_in = 400;
    const StudyReport report = run_sir_study(cfg);
    REQUIRE(report.cells.size() == 1);
    const StudyCell& cell = report.cells.front();
    INFO(cell.error);
    CHECK(cell.error.empty());
    CHECK(cell.acceptance_rate > 0.0);
    CHECK(cell.acceptance_rate < 1.0);
    const nlohmann::json j = study_report_json(report);
    const auto& jc = j.at("results").at(0).at("cells").at(0);
    CHECK(jc.at("acceptance_rate") == cell.acceptance_rate);
}

TEST_CASE("unknown study methods fail their cells without aborting") {
    StudyConfig cfg;
    cfg.n_grid = {100};
    cfg.n_seeds = 1;
    cfg.methods = {"nope"};
    const StudyReport report = run_sir_study(cfg);
    REQUIRE(report.cells.size() == 1);
    CHECK_FALSE(report.cells.front().error.empty());
    CHECK_THROWS_AS(study_median_mape(report, 100, "nope"), Error);
    const nlohmann::json j = study_report_json(report);
    CHECK(j.at("results").at(0).at("n_ok") == 0);
    CHECK(j.at("results").at(0).at("cells").at(0).contains("error"));
}

TEST_CASE("a short analysis run produces a complete posterior report") {
    CovidRunConfig cfg;
    cfg.seed = 2;
    cfg.iterations = 60;
    cfg.burn_in = 20;
    cfg.L = 25;
    cfg.tune = false;
    const CovidReport report = run_covid(cfg);

    REQUIRE(report.posterior_mean.size() == 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(report.posterior_mean[j] > 0.0);
        CHECK(report.q025[j] <= report.posterior_mean[j]);
        CHECK(report.q975[j] >= report.posterior_mean[j]);
    }
    CHECK(report.result.chain.samples.size() == 40);
    CHECK_FALSE(report.p_curve.empty());
    CHECK(report.p_curve.front().first == 0.0);
    CHECK(report.p_curve.back().first == doctest::Approx(16.0));
    CHECK(report.empirical_mean_abs_dev > 0.0);
    CHECK(report.empirical_mean_abs_dev < 1.0);

    const nlohmann::json j = covid_report_json(report);
    CHECK(j.at("kind") == "covid");
    CHECK(j.at("method") == "seir-jgdla-mc");
    for (const char* name : {"beta", "alpha", "gamma", "S0", "I0"}) {
        const auto& p = j.at("posterior").at(name);
        CHECK(p.contains("mean"));
        CHECK(p.contains("q025"));
        CHECK(p.contains("q975"));
    }
    CHECK(j.at("p_curve_dt") == report.p_curve_dt);
    CHECK(j.at("data").size() == 16);
    const auto& day7 = j.at("data").at(6);
    CHECK(day7.at("day") == 7);
    CHECK(day7.at("n").is_null());
    CHECK(j.at("data").at(0).at("n") == 31);
    CHECK(j.at("data").at(0).at("on_ship") == 3711);
}
