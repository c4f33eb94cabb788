#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chfem/diagnostics.hpp"
#include "chfem/time_integration.hpp"

namespace chfem {

// One experiment as described by a config file: a run configuration plus the
// sweep and output options of the driving subcommand.
struct ExperimentConfig {
  std::string subcommand = "run";  // run | converge | stability
  RunConfig run;
  std::vector<int> levels;              // refinement element counts (converge)
  bool normalized_errors = true;        // converge: normalize by the exact norm
  std::vector<double> stability_grid;   // courant grid (stability)
  std::string out_dir = "out";
  std::optional<double> checkpoint_every;
  std::vector<double> profile_times;  // profile dump times (default: 0 and T)
  int profile_points_per_element = 10;
};

ExperimentConfig parse_config(const std::string& text, const std::string& filename = "<config>");
ExperimentConfig load_config(const std::filesystem::path& file);
std::string serialize_config(const ExperimentConfig& cfg);

// Worker pool width: CHFEM_THREADS when set, hardware concurrency otherwise.
int worker_threads();
// Runs tasks[i]() for all i on the worker pool; exceptions are rethrown.
void parallel_tasks(const std::vector<std::function<void()>>& tasks);

struct RunResult {
  RunStatus status = RunStatus::ok;
  int abort_step = -1;
  double abort_time = 0;
};

// `run` subcommand: evolves the configured problem writing trajectory.csv,
// invariants.csv, indicators.csv (when an exact reference exists),
// profile_t*.csv dumps and status.csv into out_dir.
RunResult run_experiment(const ExperimentConfig& cfg);

struct LevelErrors {
  int N = 0;
  int M = 0;  // time steps
  double h = 0, dt = 0;
  // u errors; m errors filled for the ibvp scheme.
  double u_l2 = 0, u_linf = 0, u_h1 = 0;
  std::optional<double> m_l2, m_linf, m_h1;
};

struct ConvergeResult {
  std::vector<LevelErrors> levels;
  // rates aligned with levels (first entry unset)
  std::vector<std::optional<double>> u_l2_rate, u_linf_rate, u_h1_rate;
  std::vector<std::optional<double>> m_l2_rate, m_linf_rate, m_h1_rate;
};

// `converge` subcommand: one run per refinement level (dispatched to the
// worker pool), errors against the exact or manufactured solution, rates
// between consecutive levels; writes rates.csv.
ConvergeResult converge_experiment(const ExperimentConfig& cfg, int max_levels = 0);

struct StabilityResult {
  double max_courant = 0;
};

// `stability` subcommand: probes the configured grid, writes stability.csv.
StabilityResult stability_experiment(const ExperimentConfig& cfg);

}  // namespace chfem
