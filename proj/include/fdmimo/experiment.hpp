// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment harness: sweeps a scenario parameter over a value
// grid, runs the selected solvers on seeded channel realizations, and emits
// deterministic CSV results plus a manifest that reproduces the run.
//
// Trials are independent work items; the parallel execution mode fans them
// out with OpenMP while records land in preallocated slots, so the output is
// byte-identical to the serial reference path.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fdmimo/channel.hpp"
#include "fdmimo/solvers.hpp"

namespace fdmimo {

inline constexpr const char* kArtifactVersion = "1.0.0";

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

class usage_error : public std::runtime_error {
 public:
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

enum class Algorithm { kMm, kAiwf, kHd };

std::string algorithm_name(Algorithm a);
// Accepts "mm", "aiwf", "hd"; throws usage_error otherwise.
Algorithm algorithm_from_name(const std::string& name);

// Swept parameter axes. Powers in dBm, losses/cancellation in dB.
bool is_sweep_parameter(const std::string& name);
ScenarioConfig apply_sweep(ScenarioConfig base, const std::string& parameter,
                           double value);

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

enum class ExecutionMode { kSerial, kParallel };

struct ExperimentSpec {
  ScenarioConfig scenario;
  std::vector<Algorithm> solvers = {Algorithm::kMm, Algorithm::kAiwf};
  std::optional<SweepSpec> sweep;
  int trials = 1;
  SolverConfig solver;
  // Empty path runs in memory only (no files written).
  std::filesystem::path output_dir;
  bool emit_traces = false;
  ExecutionMode exec = ExecutionMode::kParallel;

  void validate() const;  // throws config_error
};

struct TrialRecord {
  std::optional<double> sweep_value;  // empty when the run has no sweep
  int trial = 0;
  std::uint64_t seed = 0;
  Algorithm algo = Algorithm::kMm;
  double r_u = 0.0;
  double r_d = 0.0;
  double f = 0.0;
  double rho_si_db = 0.0;
  double rho_cci_db = 0.0;
  int outer_iters = 0;
  bool converged = false;
  bool failed = false;
  double wall_ms = 0.0;  // excluded from results.csv (not reproducible)
};

struct ExperimentResult {
  std::vector<TrialRecord> records;
  std::vector<ConvergenceTrace> traces;  // aligned with records
  bool any_failed = false;
};

// Runs every (sweep value, trial, solver) combination. Channel realizations
// depend only on (master_seed, trial), so sweep points share random draws.
// Writes results.csv, timings.csv, manifest and optional trace files when
// output_dir is set; throws io_error before any solver runs if the directory
// is unusable. Per-trial solver failures become flagged rows, not errors.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Named reproductions: "fig4" (convergence traces, no sweep), "fig5a" (BS
// power sweep), "fig5b" (uplink power sweep), "fig6a" (SI cancellation
// sweep, with the half-duplex baseline), "fig6b" (cross-interference
// path-loss sweep, with the baseline). Throws usage_error on unknown names.
ExperimentSpec preset(const std::string& name);

// results.csv content for a record list; exposed so tests can compare bytes.
std::string results_csv(const std::vector<TrialRecord>& records);

// Key-value manifest capturing everything run_experiment consumed; the CLI
// accepts it back via --config.
std::string manifest_string(const ExperimentSpec& spec);

}  // namespace fdmimo
