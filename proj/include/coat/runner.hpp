#pragma once

// Batch experiment execution: builds the grid/evaluator/tuner stack from an
// ExperimentConfig, runs every repetition (worker pool, one repetition per
// task), and persists run directories:
//
//   <out>/config.conf          resolved configuration snapshot
//   <out>/summary.json         per-repetition summaries + exact aggregates
//   <out>/regret.svg           cumulative-regret curves per repetition
//   <out>/rep_000/iterations.csv   per-iteration log (one dir per repetition)
//
// Repetition r draws its noise from stream r of the experiment's base seed,
// so results are independent of worker-pool scheduling.

#include <string>
#include <vector>

#include "coat/io/config.hpp"
#include "coat/tuner.hpp"

namespace coat {

struct RepetitionOutput {
  std::vector<RunRecord> history;
  RunSummary summary;
};

struct ExperimentOutput {
  std::vector<RepetitionOutput> reps;
  /// Best-performance reference for regret: the exact grid maximum for
  /// synthetic objectives, the best non-failed measurement for simulator
  /// runs (NaN if nothing finished).
  double q_star = 0.0;
  bool q_star_exact = false;
};

/// Runs all repetitions. Thread count: COAT_TUNER_THREADS if set, else the
/// hardware concurrency, capped by the repetition count.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool quiet);

/// Writes the run directory layout described above.
void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out,
                              const std::string& out_dir);

/// Maps each configured seed point to its nearest grid index (duplicates
/// collapsed, order preserved).
std::vector<std::int64_t> seed_indices_for(const ExperimentConfig& cfg, const ParamGrid& g);

/// Builds the per-repetition evaluator (objective value or simulated lap
/// plus measurement noise). Repetition index selects the RNG stream.
Evaluator make_evaluator(const ExperimentConfig& cfg, const ParamGrid& g, int repetition);

/// Tuner-level view of the experiment configuration.
TunerConfig tuner_config_from(const ExperimentConfig& cfg);

}  // namespace coat
