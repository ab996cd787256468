#pragma once

#include <string>
#include <vector>

#include "mb/config.hpp"
#include "mb/csv.hpp"
#include "mb/learner.hpp"

namespace mb {

struct CellFailure {
  std::string algorithm;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::string error;
};

struct ExperimentOutput {
  std::vector<std::string> csv_paths;  // one per (algorithm, horizon)
  std::string summary_path;
  std::vector<CellFailure> failures;
};

// One (algorithm, horizon, seed) cell.
RunResult run_cell(const ExperimentConfig& cfg, const std::string& algorithm,
                   int horizon, std::uint64_t seed);

// Runs every cell (optionally in parallel over cells), writes
// <name>_<algorithm>_T<horizon>.csv per pair plus <name>_summary.csv, and
// records per-cell failures in <name>_failures.csv without aborting the
// rest.  Output bytes are a pure function of the config.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, int threads = 1,
                                bool log_progress = false);

// Seed-averaged curve: one SummaryRow per (algorithm, horizon, t), where a
// row's horizon is the final t of its (algorithm, seed) run.  Feeds both
// the summary CSV and the plots.
std::vector<SummaryRow> summarize(const std::vector<RegretRow>& rows);

// Mean over seeds of the final cumulative expected regret of one
// (algorithm, horizon) cell; feeds the slope fit.
double mean_final_regret(const std::vector<RegretRow>& rows,
                         const std::string& algorithm, int horizon);

}  // namespace mb
