#pragma once

// CLI entry points.  Each command validates its inputs, prints a clear error
// on stderr, and returns a process exit status (0 = success).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace coat {

struct TuneOptions {
  std::string config_path;
  std::string out_dir;  // empty -> the config's out_dir
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> algorithm_override;
  bool quiet = false;
};

/// Runs all repetitions of the configured experiment and writes the run
/// directory (config snapshot, per-repetition CSVs, summary.json, regret.svg).
int cmd_tune(const TuneOptions& opts);

struct CompareOptions {
  std::vector<std::string> run_dirs;
  std::string out_dir = "compare_out";
  bool quiet = false;
};

/// Merges >= 2 completed run directories over the same objective into a
/// results table (stdout + compare.csv) and overlaid regret curves
/// (compare_regret.svg).  Refuses to mix objectives.
int cmd_compare(const CompareOptions& opts);

struct HeatmapOptions {
  std::string run_dir;
  std::string out_path;  // empty -> <run_dir>/heatmap.svg
  int repetition = 0;
  bool quiet = false;
};

/// Rebuilds the GP posterior from a logged 2-D run and renders the
/// posterior-mean heatmap with the sample trajectory, seed and best-sample
/// markers, and (for synthetic objectives) the true q = tau contour.
int cmd_heatmap(const HeatmapOptions& opts);

struct OracleOptions {
  std::string config_path;
  std::string out_path;  // empty -> print only
  bool quiet = false;
};

/// Exhaustive references for a synthetic objective under the config's
/// threshold settings: the global grid maximum and the reachable set from
/// the seed, printed and optionally written as JSON.
int cmd_oracle(const OracleOptions& opts);

}  // namespace coat
