#pragma once

// Experiment configuration: a single human-editable key=value file.
//
//   # comment
//   algorithm = coat              # coat | gp_ucb | safe_opt
//   objective = synthetic:constrained2d   # or sim:stadium / sim:<track.csv>
//   grid.lo = 0, 0
//   grid.hi = 1000, 1000
//   grid.count = 100, 100
//   kernel.variance = 0.15
//   kernel.lengthscale = 0.1
//   noise.sigma = 0.05
//   beta.mode = fixed             # fixed | theoretical
//   beta.value = 5.0
//   epsilon = 0.45
//   lipschitz.L = 16.0
//   constraint.tau = 0.0          # XOR constraint.tau_scale = 1.3
//   max_iters = 70
//   repetitions = 50
//   rng_seed = 1
//   seed.points = 180, 300        # physical coords; ';' separates points
//   out_dir = runs/demo
//   log.wall_ms = false
//
// Unknown keys, duplicate keys, and malformed values are rejected with the
// offending line number.  Omitted keys fall back to per-objective defaults.

#include <cstdint>
#include <string>
#include <vector>

#include "coat/gp.hpp"
#include "coat/grid.hpp"
#include "coat/tuner.hpp"

namespace coat {

enum class Algorithm { coat, gp_ucb, safe_opt };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);  // throws on unknown

enum class ObjectiveKind { synthetic, simulator };

/// Fully resolved experiment description: every field is concrete after
/// parsing (objective defaults applied).
struct ExperimentConfig {
  Algorithm algorithm = Algorithm::coat;
  ObjectiveKind kind = ObjectiveKind::synthetic;
  std::string objective_name;  // registry name, or "stadium" / track CSV path
  std::string objective_spec;  // verbatim config value, echoed in summaries
  std::vector<GridAxis> axes;
  KernelParams kernel;
  double noise_sigma = 0.05;
  BetaSchedule beta;
  double epsilon = 0.4;
  double lipschitz = 1.0;
  TauPolicy tau;
  int max_iters = 70;
  int repetitions = 1;
  std::uint64_t rng_seed = 1;
  std::vector<std::vector<double>> seed_points;  // physical coordinates
  std::string out_dir = "runs";
  bool log_wall_ms = false;
};

/// Parses config text; throws std::runtime_error with line-precise messages.
ExperimentConfig parse_experiment_config(const std::string& text);

/// Reads and parses a config file (errors mention the path).
ExperimentConfig load_experiment_config(const std::string& path);

/// Renders the resolved config back to the key=value format.  Written next
/// to run outputs so every run directory is self-describing; re-parsing the
/// rendered text reproduces the same configuration.
std::string render_experiment_config(const ExperimentConfig& cfg);

}  // namespace coat
