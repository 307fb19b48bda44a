#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coat/gp.hpp"
#include "coat/grid.hpp"
#include "coat/sets.hpp"

namespace coat {

/// One performance evaluation. `failed` marks a run that produced no valid
/// measurement (e.g. the car left the track); the tuner substitutes the
/// failure penalty tau - 3 sigma_eta and flags the round.
struct EvalResult {
  double y = 0.0;
  bool failed = false;
};

/// Evaluators own their randomness; the tuner itself is deterministic given
/// the evaluator's outputs.
using Evaluator = std::function<EvalResult(std::int64_t)>;

/// Safety threshold policy. Absolute mode fixes tau up front; scale mode
/// derives tau = scale * first measurement, which on negative performance
/// values (like negated lap seconds) requires scale >= 1.
struct TauPolicy {
  bool is_scale = false;
  double value = 0.0;
};

struct TunerConfig {
  KernelParams kernel;
  double gp_noise_var = 1e-4;
  BetaSchedule beta;
  double lipschitz = 1.0;
  double epsilon = 0.1;
  TauPolicy tau;
  int max_iters = 70;
  /// Evaluator noise scale sigma_eta; only used to form the failure penalty.
  double eval_noise_sigma = 0.0;
  /// Optional noiseless oracle. When present, violation flags use
  /// q(theta) < tau instead of the noisy measurement.
  std::function<double(std::int64_t)> true_q;
};

struct RunRecord {
  int n = 0;
  std::int64_t theta_index = -1;
  std::vector<double> theta_coords;
  double y = 0.0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  bool violated = false;
  bool failed = false;
  std::int64_t goal_index = -1;
  bool in_pess = false;
  std::int64_t pess_size = 0;
  std::int64_t opti_size = 0;
  double wall_millis = 0.0;
};

enum class StopReason { running, converged, budget_exhausted, optimistic_exhausted, seed_failed };

const char* to_string(StopReason r);

struct RunSummary {
  std::int64_t recommended_index = -1;
  std::vector<double> recommended_coords;
  bool converged = false;
  StopReason reason = StopReason::running;
  int iterations_used = 0;
  int violations = 0;
  double best_y = std::numeric_limits<double>::quiet_NaN();
  double min_y = std::numeric_limits<double>::quiet_NaN();
  double mean_y = std::numeric_limits<double>::quiet_NaN();
  double std_y = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::quiet_NaN();
  double first_y = std::numeric_limits<double>::quiet_NaN();
};

/// Mutable loop state. Confidence bounds and the GP live on the recentered
/// scale (observations minus the first measurement); records and summaries
/// report raw values.
struct TunerState {
  TunerState(GpModel gp_in, ConfidenceState cs_in, SetState ss_in)
      : gp(std::move(gp_in)), cs(std::move(cs_in)), ss(std::move(ss_in)) {}

  GpModel gp;
  ConfidenceState cs;
  SetState ss;
  double y_ref = 0.0;
  bool y_ref_set = false;
  double tau_raw = std::numeric_limits<double>::quiet_NaN();
  bool tau_set = false;
  int rounds = 0;
  bool terminated = false;
  StopReason reason = StopReason::running;
  std::int64_t recommendation = -1;
  bool recommendation_converged = false;
  std::vector<RunRecord> history;
};

TunerState make_tuner_state(const TunerConfig& cfg, const ParamGrid& g, const Metric& m,
                            std::vector<std::int64_t> seed);

/// argmax of u over the optimistic set, ties to the lowest flat index.
std::int64_t select_goal(const SetState& ss, const ConfidenceState& cs);

/// True when the goal is certified (in pess) and its interval width is
/// strictly below eps.
bool check_termination(const SetState& ss, const ConfidenceState& cs, std::int64_t goal,
                       double eps);

/// Closest certified point to the goal whose interval is still wide enough
/// to be worth measuring: argmin distance over {theta in pess : w >= eps},
/// ties to the lowest flat index. Empty filter -> nullopt (the certified
/// set is fully resolved).
std::optional<std::int64_t> constrained_expansion(const SetState& ss, const ConfidenceState& cs,
                                                  const Metric& m, std::int64_t goal, double eps);

/// Executes one measurement round (or terminates the run). Returns false
/// once the state is terminal; calling it again is a no-op.
bool tuner_step(TunerState& st, const TunerConfig& cfg, const ParamGrid& g, const Metric& m,
                const Evaluator& eval);

/// Full loop: repeated tuner_step until termination or budget exhaustion.
std::pair<std::vector<RunRecord>, RunSummary> run(const TunerConfig& cfg, const ParamGrid& g,
                                                  const Metric& m,
                                                  std::vector<std::int64_t> seed,
                                                  const Evaluator& eval);

/// Summary assembly shared with the baseline drivers.
RunSummary summarize_run(const TunerState& st, const ParamGrid& g);

}  // namespace coat
