#include "coat/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace coat {

namespace {

/// Shared first-round bookkeeping: pin the sample to the first seed, set
/// tau, recenter. Returns the raw measurement.
double settle_first_round(TunerState& st, const TunerConfig& cfg, const EvalResult& ev) {
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
    return ev.y;
  }
  st.y_ref = st.tau_raw - 3.0 * cfg.eval_noise_sigma;
  st.y_ref_set = true;
  return st.y_ref;
}

}  // namespace

std::int64_t gp_ucb_step(const Posterior& post, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("gp_ucb: beta must be > 0");
  const double root = std::sqrt(beta);
  std::int64_t best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < post.mu.size(); ++i) {
    const double score = post.mu[i] + root * post.sigma[i];
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::int64_t safe_opt_step(const IndexMask& safe, const ConfidenceState& cs, double lipschitz,
                           double tau, const ParamGrid& g, const Metric& m) {
  const std::int64_t n = g.size();
  if (static_cast<std::int64_t>(safe.size()) != n)
    throw std::invalid_argument("safe_opt: mask size does not match grid");
  double best_l = -std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> members;
  for (std::int64_t i = 0; i < n; ++i) {
    if (!safe[i]) continue;
    members.push_back(i);
    if (cs.l[i] > best_l) best_l = cs.l[i];
  }
  if (members.empty()) throw std::invalid_argument("safe_opt: safe set is empty");

  // Widest-first order lets the expander scan stop at the first qualifying
  // candidate; ties resolve to the lowest flat index.
  std::stable_sort(members.begin(), members.end(), [&](std::int64_t a, std::int64_t b) {
    const double wa = cs.u[a] - cs.l[a];
    const double wb = cs.u[b] - cs.l[b];
    if (wa != wb) return wa > wb;
    return a < b;
  });
  for (std::int64_t i : members) {
    if (cs.u[i] >= best_l) return i;
    if (ball_reaches_outside(safe, cs.u[i], lipschitz, tau, i, g, m)) return i;
  }
  // No maximizer or expander left; fall back to the widest safe interval.
  return members.front();
}

std::pair<std::vector<RunRecord>, RunSummary> run_gp_ucb(const TunerConfig& cfg,
                                                          const ParamGrid& g, const Metric& m,
                                                          std::vector<std::int64_t> seed,
                                                          const Evaluator& eval) {
  TunerState st = make_tuner_state(cfg, g, m, std::move(seed));
  const std::int64_t n = g.size();
  while (st.rounds < cfg.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    const int round = st.rounds + 1;
    std::int64_t chosen;
    if (round == 1) {
      chosen = st.ss.seed.front();
    } else {
      chosen = gp_ucb_step(st.gp.posterior(m, g), beta_at(cfg.beta, round));
    }
    EvalResult ev = eval(chosen);
    RunRecord rec;
    rec.n = round;
    rec.theta_index = chosen;
    rec.theta_coords = g.physical_coords(chosen);
    rec.goal_index = chosen;
    rec.in_pess = false;
    rec.failed = ev.failed;
    rec.pess_size = 0;
    rec.opti_size = n;
    if (round == 1) {
      if (ev.failed && cfg.tau.is_scale) {
        st.terminated = true;
        st.reason = StopReason::seed_failed;
        rec.y = std::numeric_limits<double>::quiet_NaN();
        rec.violated = true;
        st.history.push_back(std::move(rec));
        st.rounds = round;
        break;
      }
      settle_first_round(st, cfg, ev);
    }
    const double y_raw = ev.failed ? st.tau_raw - 3.0 * cfg.eval_noise_sigma : ev.y;
    rec.y = y_raw;
    rec.tau = st.tau_raw;
    rec.violated = cfg.true_q ? (cfg.true_q(chosen) < st.tau_raw) : (y_raw < st.tau_raw);
    st.gp.add_observation(chosen, y_raw - st.y_ref);
    rec.wall_millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    st.history.push_back(std::move(rec));
    st.rounds = round;
  }
  if (st.reason == StopReason::running) {
    st.terminated = true;
    st.reason = StopReason::budget_exhausted;
  }
  // Recommend the best raw measurement.
  double best = -std::numeric_limits<double>::infinity();
  for (const RunRecord& r : st.history) {
    if (std::isfinite(r.y) && r.y > best) {
      best = r.y;
      st.recommendation = r.theta_index;
    }
  }
  RunSummary summary = summarize_run(st, g);
  return {std::move(st.history), std::move(summary)};
}

std::pair<std::vector<RunRecord>, RunSummary> run_safe_opt(const TunerConfig& cfg,
                                                            const ParamGrid& g, const Metric& m,
                                                            std::vector<std::int64_t> seed,
                                                            const Evaluator& eval) {
  TunerState st = make_tuner_state(cfg, g, m, std::move(seed));
  IndexMask safe = st.ss.pess;
  while (st.rounds < cfg.max_iters) {
    const auto t0 = std::chrono::steady_clock::now();
    const int round = st.rounds + 1;
    std::int64_t chosen;
    if (round == 1) {
      chosen = st.ss.seed.front();
    } else {
      chosen = safe_opt_step(safe, st.cs, cfg.lipschitz, st.tau_raw - st.y_ref, g, m);
    }
    EvalResult ev = eval(chosen);
    RunRecord rec;
    rec.n = round;
    rec.theta_index = chosen;
    rec.theta_coords = g.physical_coords(chosen);
    rec.goal_index = chosen;
    rec.in_pess = safe[chosen] != 0;
    rec.failed = ev.failed;
    if (round == 1) {
      if (ev.failed && cfg.tau.is_scale) {
        st.terminated = true;
        st.reason = StopReason::seed_failed;
        rec.y = std::numeric_limits<double>::quiet_NaN();
        rec.violated = true;
        st.history.push_back(std::move(rec));
        st.rounds = round;
        break;
      }
      settle_first_round(st, cfg, ev);
      clamp_seed_lower(st.cs, st.ss.seed, st.tau_raw - st.y_ref);
    }
    const double y_raw = ev.failed ? st.tau_raw - 3.0 * cfg.eval_noise_sigma : ev.y;
    rec.y = y_raw;
    rec.tau = st.tau_raw;
    rec.violated = cfg.true_q ? (cfg.true_q(chosen) < st.tau_raw) : (y_raw < st.tau_raw);
    st.gp.add_observation(chosen, y_raw - st.y_ref);
    update_bounds(st.cs, st.gp.posterior(m, g), beta_at(cfg.beta, round + 1));
    IndexMask grown =
        pessimistic_step(safe, st.cs, cfg.lipschitz, st.tau_raw - st.y_ref, g, m);
    for (std::size_t i = 0; i < safe.size(); ++i)
      if (safe[i]) grown[i] = 1;
    safe = std::move(grown);
    rec.pess_size = mask_count(safe);
    rec.opti_size = g.size();
    rec.wall_millis =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    st.history.push_back(std::move(rec));
    st.rounds = round;
  }
  if (st.reason == StopReason::running) {
    st.terminated = true;
    st.reason = StopReason::budget_exhausted;
  }
  // Recommend the best certified lower bound.
  double best_l = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < g.size(); ++i) {
    if (safe[i] && st.cs.l[i] > best_l) {
      best_l = st.cs.l[i];
      st.recommendation = i;
    }
  }
  RunSummary summary = summarize_run(st, g);
  return {std::move(st.history), std::move(summary)};
}

}  // namespace coat
