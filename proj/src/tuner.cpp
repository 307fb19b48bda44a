#include "coat/tuner.hpp"

#include <chrono>
#include <stdexcept>

namespace coat {

namespace {

/// Goal selection with a per-round exclusion mask; exclusions hold goals
/// that turned out to be unreachable this round.
std::int64_t select_goal_excluding(const SetState& ss, const ConfidenceState& cs,
                                   const IndexMask* excluded) {
  std::int64_t best = -1;
  double best_u = -std::numeric_limits<double>::infinity();
  const std::int64_t n = cs.u.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (!ss.opti[i]) continue;
    if (excluded && (*excluded)[i]) continue;
    if (cs.u[i] > best_u) {
      best_u = cs.u[i];
      best = i;
    }
  }
  return best;
}

double tau_shifted(const TunerState& st) { return st.tau_raw - st.y_ref; }

struct Selection {
  bool terminal = false;
  std::int64_t chosen = -1;
  std::int64_t goal = -1;
};

/// Runs goal selection, termination check and constrained expansion until a
/// measurable point or a terminal verdict emerges. Goals outside the
/// certified set whose expansion comes back empty are excluded and the goal
/// is re-picked; the certified set must be fully resolved for that to
/// happen, so the cascade ends quickly.
Selection select_action(TunerState& st, const TunerConfig& cfg, const Metric& m) {
  Selection sel;
  IndexMask excluded(st.ss.opti.size(), 0);
  bool any_excluded = false;
  while (true) {
    const std::int64_t goal =
        select_goal_excluding(st.ss, st.cs, any_excluded ? &excluded : nullptr);
    if (goal < 0) {
      st.terminated = true;
      st.reason = StopReason::optimistic_exhausted;
      std::int64_t rec = -1;
      double best_l = -std::numeric_limits<double>::infinity();
      for (std::int64_t i = 0; i < static_cast<std::int64_t>(st.ss.pess.size()); ++i) {
        if (st.ss.pess[i] && st.cs.l[i] > best_l) {
          best_l = st.cs.l[i];
          rec = i;
        }
      }
      st.recommendation = rec;
      sel.terminal = true;
      return sel;
    }
    sel.goal = goal;
    if (st.ss.pess[goal]) {
      if (check_termination(st.ss, st.cs, goal, cfg.epsilon)) {
        st.terminated = true;
        st.reason = StopReason::converged;
        st.recommendation = goal;
        st.recommendation_converged = true;
        sel.terminal = true;
        return sel;
      }
      sel.chosen = goal;
      return sel;
    }
    const auto ce = constrained_expansion(st.ss, st.cs, m, goal, cfg.epsilon);
    if (ce.has_value()) {
      sel.chosen = *ce;
      return sel;
    }
    excluded[goal] = 1;
    any_excluded = true;
  }
}

}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::running: return "running";
    case StopReason::converged: return "converged";
    case StopReason::budget_exhausted: return "budget_exhausted";
    case StopReason::optimistic_exhausted: return "optimistic_exhausted";
    case StopReason::seed_failed: return "seed_failed";
  }
  return "unknown";
}

TunerState make_tuner_state(const TunerConfig& cfg, const ParamGrid& g, const Metric& m,
                            std::vector<std::int64_t> seed) {
  if (seed.empty()) throw std::invalid_argument("tuner: seed set must be nonempty");
  if (cfg.max_iters < 1) throw std::invalid_argument("tuner: max_iters must be >= 1");
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("tuner: epsilon must be >= 0");
  if (cfg.tau.is_scale && !(cfg.tau.value >= 1.0))
    throw std::invalid_argument("tuner: tau scale must be >= 1");
  TunerState st(GpModel(cfg.kernel, cfg.gp_noise_var), make_unbounded_confidence(g.size()),
                make_initial_sets(g.size(), std::move(seed)));
  update_bounds(st.cs, st.gp.posterior(m, g), beta_at(cfg.beta, 1));
  return st;
}

std::int64_t select_goal(const SetState& ss, const ConfidenceState& cs) {
  return select_goal_excluding(ss, cs, nullptr);
}

bool check_termination(const SetState& ss, const ConfidenceState& cs, std::int64_t goal,
                       double eps) {
  if (goal < 0 || goal >= cs.u.size()) return false;
  if (!ss.pess[goal]) return false;
  return cs.u[goal] - cs.l[goal] < eps;
}

std::optional<std::int64_t> constrained_expansion(const SetState& ss, const ConfidenceState& cs,
                                                  const Metric& m, std::int64_t goal,
                                                  double eps) {
  std::int64_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  const std::int64_t n = cs.u.size();
  for (std::int64_t i = 0; i < n; ++i) {
    if (!ss.pess[i]) continue;
    if (!(cs.u[i] - cs.l[i] >= eps)) continue;
    const double d = m(goal, i);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

bool tuner_step(TunerState& st, const TunerConfig& cfg, const ParamGrid& g, const Metric& m,
                const Evaluator& eval) {
  if (st.terminated) return false;
  if (st.rounds >= cfg.max_iters) {
    st.terminated = true;
    if (st.reason == StopReason::running) st.reason = StopReason::budget_exhausted;
    return false;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const int round = st.rounds + 1;

  Selection sel = select_action(st, cfg, m);
  if (sel.terminal) return false;
  // The first measurement is pinned to the first seed point: it anchors the
  // observation recentering and, under the scale policy, defines tau.
  if (round == 1) sel.chosen = st.ss.seed.front();

  const bool in_pess = st.ss.pess[sel.chosen] != 0;
  EvalResult ev = eval(sel.chosen);

  RunRecord rec;
  rec.n = round;
  rec.theta_index = sel.chosen;
  rec.theta_coords = g.physical_coords(sel.chosen);
  rec.goal_index = sel.goal;
  rec.in_pess = in_pess;
  rec.failed = ev.failed;

  if (ev.failed && !st.tau_set && cfg.tau.is_scale) {
    // No threshold exists yet, so no penalty value can stand in for the
    // failed measurement; the run cannot continue.
    st.terminated = true;
    st.reason = StopReason::seed_failed;
    st.recommendation = -1;
    rec.y = std::numeric_limits<double>::quiet_NaN();
    rec.violated = true;
    rec.pess_size = st.ss.pess_count;
    rec.opti_size = st.ss.opti_count;
    st.history.push_back(std::move(rec));
    st.rounds = round;
    return false;
  }

  if (round == 1) {
    if (!cfg.tau.is_scale) {
      st.tau_raw = cfg.tau.value;
      st.tau_set = true;
    }
    if (!ev.failed) {
      st.y_ref = ev.y;
      st.y_ref_set = true;
      if (cfg.tau.is_scale) {
        st.tau_raw = cfg.tau.value * ev.y;
        st.tau_set = true;
      }
    } else {
      // Absolute policy with a failed seed: recenter on the penalty.
      st.y_ref = st.tau_raw - 3.0 * cfg.eval_noise_sigma;
      st.y_ref_set = true;
    }
    clamp_seed_lower(st.cs, st.ss.seed, tau_shifted(st));
  }

  const double y_raw = ev.failed ? st.tau_raw - 3.0 * cfg.eval_noise_sigma : ev.y;
  rec.y = y_raw;
  rec.tau = st.tau_raw;
  rec.violated = cfg.true_q ? (cfg.true_q(sel.chosen) < st.tau_raw) : (y_raw < st.tau_raw);

  st.gp.add_observation(sel.chosen, y_raw - st.y_ref);
  update_bounds(st.cs, st.gp.posterior(m, g), beta_at(cfg.beta, round + 1));
  st.ss = update_sets(st.ss, st.cs, cfg.lipschitz, cfg.epsilon, tau_shifted(st), g, m);

  rec.pess_size = st.ss.pess_count;
  rec.opti_size = st.ss.opti_count;
  rec.wall_millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  st.history.push_back(std::move(rec));
  st.rounds = round;

  if (st.rounds >= cfg.max_iters) {
    st.terminated = true;
    st.reason = StopReason::budget_exhausted;
    st.recommendation = sel.goal;
    st.recommendation_converged = false;
    return false;
  }
  return true;
}

RunSummary summarize_run(const TunerState& st, const ParamGrid& g) {
  RunSummary s;
  s.recommended_index = st.recommendation;
  if (st.recommendation >= 0) s.recommended_coords = g.physical_coords(st.recommendation);
  s.converged = st.recommendation_converged;
  s.reason = st.reason;
  s.iterations_used = st.rounds;
  s.tau = st.tau_raw;
  int count = 0;
  double sum = 0.0;
  for (const RunRecord& r : st.history) {
    if (r.violated) ++s.violations;
    if (!std::isfinite(r.y)) continue;
    if (count == 0) {
      s.best_y = s.min_y = r.y;
    } else {
      s.best_y = std::max(s.best_y, r.y);
      s.min_y = std::min(s.min_y, r.y);
    }
    sum += r.y;
    ++count;
  }
  if (!st.history.empty() && std::isfinite(st.history.front().y))
    s.first_y = st.history.front().y;
  if (count > 0) {
    s.mean_y = sum / count;
    double acc = 0.0;
    for (const RunRecord& r : st.history) {
      if (!std::isfinite(r.y)) continue;
      acc += (r.y - s.mean_y) * (r.y - s.mean_y);
    }
    s.std_y = std::sqrt(acc / count);
  }
  return s;
}

std::pair<std::vector<RunRecord>, RunSummary> run(const TunerConfig& cfg, const ParamGrid& g,
                                                  const Metric& m,
                                                  std::vector<std::int64_t> seed,
                                                  const Evaluator& eval) {
  TunerState st = make_tuner_state(cfg, g, m, std::move(seed));
  while (tuner_step(st, cfg, g, m, eval)) {
  }
  RunSummary summary = summarize_run(st, g);
  return {std::move(st.history), std::move(summary)};
}

}  // namespace coat
