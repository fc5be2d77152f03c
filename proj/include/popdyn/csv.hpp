#pragma once

#include <string>
#include <vector>

#include "popdyn/mcmc.hpp"
#include "popdyn/seir_covid.hpp"
#include "popdyn/trajectory.hpp"

namespace popdyn {

// Trajectory files: header `t,<class>,...`, values at 17 significant digits
// so a write/read round trip is exact.
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::string>& class_names);

struct TrajectoryCsv {
    Trajectory trajectory;
    std::vector<std::string> class_names;
};
TrajectoryCsv read_trajectory_csv(const std::string& path);

// Reorders state columns to match `order`; names must be a permutation.
Trajectory reorder_classes(const TrajectoryCsv& data,
                           const std::vector<std::string>& order);

// Binomial count files: header `t,n,y[,on_ship]`. Rows with NA counts are
// dropped with a note pushed to `warnings` (when given).
std::vector<BinomialObservation> read_binomial_csv(
    const std::string& path, std::vector<std::string>* warnings = nullptr);

// Full testing-record round trip, missing days preserved as NA.
void write_covid_csv(const std::string& path,
                     const std::vector<CovidRow>& rows);
std::vector<CovidRow> read_covid_csv(const std::string& path);

// One row per retained iteration: `iter,<name>,...` with iter the absolute
// iteration index (burn-in offsets the first row).
void write_chain_csv(const std::string& path, const PosteriorChain& chain);

}  // namespace popdyn
