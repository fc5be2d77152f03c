#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "popdyn/config.hpp"
#include "popdyn/csv.hpp"
#include "popdyn/util.hpp"

using namespace popdyn;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("popdyn_test_" + name);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    REQUIRE(out.good());
    out << text;
}

struct FileGuard {
    fs::path p;
    ~FileGuard() { std::error_code ec; fs::remove(p, ec); }
};

}  // namespace

TEST_CASE("trajectory files round-trip bit for bit") {
    Trajectory traj;
    traj.times = {0.0, 0.5, 2.0};
    traj.states = {(Vec(2) << 0.1 + 0.2, 1.0 / 3.0).finished(),
                   (Vec(2) << 1e-17, 0.7).finished(),
                   (Vec(2) << 0.123456789012345678, 1.0).finished()};
    const fs::path p = temp_file("traj.csv");
    FileGuard guard{p};
    write_trajectory_csv(p.string(), traj, {"S", "I"});

    const TrajectoryCsv back = read_trajectory_csv(p.string());
    CHECK(back.class_names == std::vector<std::string>{"S", "I"});
    REQUIRE(back.trajectory.times.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(back.trajectory.times[k] == traj.times[k]);
        CHECK((back.trajectory.states[k] - traj.states[k])
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}

TEST_CASE("state columns follow the header, not a fixed order") {
    const fs::path p = temp_file("swapped.csv");
    FileGuard guard{p};
    spit(p, "t,I,S\n0,0.05,0.95\n1,0.07,0.9\n");
    const TrajectoryCsv data = read_trajectory_csv(p.string());
    CHECK(data.class_names == std::vector<std::string>{"I", "S"});
    const Trajectory in_si = reorder_classes(data, {"S", "I"});
    CHECK(in_si.states[0][0] == 0.95);
    CHECK(in_si.states[0][1] == 0.05);
    CHECK(in_si.states[1][0] == 0.9);
    CHECK(in_si.states[1][1] == 0.07);
    CHECK_THROWS_AS(reorder_classes(data, {"S", "R"}), DimensionMismatch);
    CHECK_THROWS_AS(reorder_classes(data, {"S"}), DimensionMismatch);
}

TEST_CASE("trajectory parsing reports the offending line") {
    const fs::path p = temp_file("badtraj.csv");
    FileGuard guard{p};
    spit(p, "t,S,I\n0,0.9,0.1\n1,oops,0.2\n");
    try {
        read_trajectory_csv(p.string());
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }

    spit(p, "t,S,I\n1,0.9,0.1\n0.5,0.8,0.2\n");
    CHECK_THROWS_AS(read_trajectory_csv(p.string()), NonMonotoneTime);

    spit(p, "time,S,I\n0,0.9,0.1\n");
    CHECK_THROWS_AS(read_trajectory_csv(p.string()), MalformedRow);
}

TEST_CASE("the bundled cruise-ship file parses to the embedded record") {
    const std::string path =
        std::string(POPDYN_REPO_ROOT) + "/data/diamond_princess.csv";

    const std::vector<CovidRow> rows = read_covid_csv(path);
    const std::vector<CovidRow>& expected = diamond_princess_rows();
    REQUIRE(rows.size() == expected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].day == expected[i].day);
        CHECK(rows[i].has_obs == expected[i].has_obs);
        CHECK(rows[i].on_ship == expected[i].on_ship);
        if (rows[i].has_obs) {
            CHECK(rows[i].n == expected[i].n);
            CHECK(rows[i].y == expected[i].y);
        }
    }

    std::vector<std::string> warnings;
    const auto obs = read_binomial_csv(path, &warnings);
    const auto reference = covid_observations();
    REQUIRE(obs.size() == reference.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        CHECK(obs[i].t == reference[i].t);
        CHECK(obs[i].n == reference[i].n);
        CHECK(obs[i].y == reference[i].y);
    }
    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].find(":8:") != std::string::npos);
    CHECK(warnings[1].find(":11:") != std::string::npos);
    CHECK(warnings[0].find("row dropped") != std::string::npos);

    // Re-emitting the embedded record reproduces the bundled file exactly.
    const fs::path p = temp_file("covid.csv");
    FileGuard guard{p};
    write_covid_csv(p.string(), expected);
    CHECK(slurp(p) == slurp(path));
}

TEST_CASE("count files reject impossible and disordered rows") {
    const fs::path p = temp_file("counts.csv");
    FileGuard guard{p};
    spit(p, "t,n,y\n1,10,3\n2,5,6\n");
    try {
        read_binomial_csv(p.string());
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("y exceeds n") != std::string::npos);
    }

    spit(p, "t,n,y\n2,10,3\n1,5,2\n");
    CHECK_THROWS_AS(read_binomial_csv(p.string()), NonMonotoneTime);

    spit(p, "t,n,y\n1,10,3\nNA,5,2\n");
    CHECK_THROWS_AS(read_binomial_csv(p.string()), MalformedRow);
}

TEST_CASE("chain files carry names and absolute iteration indices") {
    PosteriorChain chain;
    chain.names = {"beta", "gamma"};
    chain.burn_in = 100;
    chain.samples = {(Vec(2) << 0.5, 0.15).finished(),
                     (Vec(2) << 0.52, 0.16).finished()};
    const fs::path p = temp_file("chain.csv");
    FileGuard guard{p};
    write_chain_csv(p.string(), chain);
    const std::string text = slurp(p);
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "iter,beta,gamma");
    std::getline(ss, line);
    CHECK(line.rfind("100,", 0) == 0);
    std::getline(ss, line);
    CHECK(line.rfind("101,", 0) == 0);
    CHECK(line.find(format_full(0.52)) != std::string::npos);

    PosteriorChain empty;
    CHECK_THROWS_AS(write_chain_csv(p.string(), empty), Error);
}

TEST_CASE("configuration text: comments, duplicates, and typing") {
    const Config cfg = Config::parse_text(
        "# run setup\n"
        "seed = 7\n"
        "t_end = 30.0   # days\n"
        "model = sir\n"
        "quiet = true\n"
        "x0 = 0.95, 0.05\n"
        "seed = 9\n",
        "inline.cfg");

    CHECK(cfg.get_int("seed") == 9);
    CHECK(cfg.get_double("t_end") == 30.0);
    CHECK(cfg.get_string("model") == "sir");
    CHECK(cfg.get_bool("quiet", false));
    CHECK(cfg.get_double_list("x0") == std::vector<double>{0.95, 0.05});
    CHECK(cfg.get_u64("seed", 0) == 9);

    CHECK(cfg.get_double("missing", 2.5) == 2.5);
    CHECK(cfg.get_int("missing", -3) == -3);
    CHECK(cfg.get_string("missing", "d") == "d");
    CHECK(cfg.get_double_list("missing", {1.0}) == std::vector<double>{1.0});
    CHECK_FALSE(cfg.has("missing"));

    try {
        cfg.get_double("model");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("inline.cfg:4") != std::string::npos);
        CHECK(msg.find("model") != std::string::npos);
    }
    try {
        cfg.get_double("nope");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }
    CHECK_THROWS_AS(cfg.get_bool("model", true), ConfigError);
    CHECK_THROWS_AS(cfg.get_double_list("model"), ConfigError);
}

TEST_CASE("malformed configuration lines carry their origin") {
    try {
        Config::parse_text("a = 1\nnot an assignment\n", "bad.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse_text("= 3\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_file("/nonexistent/path.cfg"), ConfigError);

    // Comment-only and blank lines parse to an empty table.
    const Config empty = Config::parse_text("# nothing\n\n  \n");
    CHECK(empty.entries().empty());
}
