// Acceptance checks: each criterion prints exactly one [PASS]/[FAIL] line
// with the measured numbers next to the required bounds.  The process exit
// status is the number of failed criteria.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "coat/baselines.hpp"
#include "coat/bench/objectives.hpp"
#include "coat/bench/simulator.hpp"
#include "coat/bench/track.hpp"
#include "coat/commands.hpp"
#include "coat/gp.hpp"
#include "coat/grid.hpp"
#include "coat/io/config.hpp"
#include "coat/io/csv.hpp"
#include "coat/rng.hpp"
#include "coat/runner.hpp"
#include "coat/sets.hpp"
#include "coat/tuner.hpp"
#include "oracles.hpp"

using namespace coat;
namespace fs = std::filesystem;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Result {
  bool pass = false;
  std::string line;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Incremental GP posterior vs a dense-solve reference.
// ---------------------------------------------------------------------------

Result c1_gp_reference() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto family = testing::grid_family(200);
  double worst_mu = 0.0, worst_sigma = 0.0;
  for (int c = 0; c < 100; ++c) {
    Rng rng(1001, static_cast<std::uint64_t>(c));
    const auto& axes = family[c % family.size()];
    const ParamGrid g(axes);
    const Metric m(g);
    KernelParams kp;
    kp.variance = 0.2 + 1.8 * rng.uniform();
    kp.lengthscale = 0.05 + 0.45 * rng.uniform();
    const double noise_var = std::pow(10.0, -4.0 + 3.0 * rng.uniform());
    GpModel gp(kp, noise_var);
    std::vector<std::int64_t> idx;
    std::vector<double> ys;
    const int n_obs = 1 + static_cast<int>(rng.uniform() * 50.0) % 50;
    for (int k = 0; k < n_obs; ++k) {
      const std::int64_t i = static_cast<std::int64_t>(rng.uniform() * g.size()) % g.size();
      const double y = 4.0 * rng.uniform() - 2.0;
      idx.push_back(i);
      ys.push_back(y);
      gp.add_observation(i, y);
    }
    const Posterior& post = gp.posterior(m, g);
    const testing::OraclePosterior ref = testing::oracle_posterior(g, kp, noise_var, idx, ys);
    for (std::int64_t j = 0; j < g.size(); ++j) {
      worst_mu = std::max(worst_mu, std::abs(post.mu[j] - ref.mu[j]));
      worst_sigma = std::max(worst_sigma, std::abs(post.sigma[j] - ref.sigma[j]));
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = worst_mu < 1e-8 && worst_sigma < 1e-8 && secs < 10.0;
  return {pass,
          fmt("1. incremental GP matches a dense-solve reference: 100 cases, worst "
              "|dmu| %.2e, worst |dsigma| %.2e (tol 1e-8), %.1f s (limit 10 s)",
              worst_mu, worst_sigma, secs)};
}

// ---------------------------------------------------------------------------
// 2. Closure operators vs the brute-force transitive-closure reference.
// ---------------------------------------------------------------------------

Result c2_closure_reference() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto family = testing::grid_family(500);
  long trials = 0, mismatches = 0;
  for (std::size_t gi = 0; gi < family.size(); ++gi) {
    const ParamGrid g(family[gi]);
    const Metric m(g);
    const std::int64_t n = g.size();
    for (int t = 0; t < 50; ++t) {
      Rng rng(2000 + gi, static_cast<std::uint64_t>(t));
      const Eigen::VectorXd b = testing::random_vector(rng, n, -0.5, 1.5);
      const double lipschitz = 0.5 + 2.5 * rng.uniform();
      const double tau = -0.2 + 0.6 * rng.uniform();
      const double eps = 0.3 * rng.uniform();
      const IndexMask s0 = testing::random_mask(rng, n, 0.06);
      const bool optimistic = (t % 2) == 1;
      const double pass_level = optimistic ? tau + eps : tau;

      ConfidenceState cs;
      cs.l = b;
      cs.u = b;
      cs.updates = 1;
      const auto step = [&](const IndexMask& s) {
        return optimistic ? optimistic_step(s, cs, lipschitz, eps, tau, g, m)
                          : pessimistic_step(s, cs, lipschitz, tau, g, m);
      };
      const IndexMask via_fixed_point = expand_fixed_point(step, s0);
      const IndexMask via_frontier = lipschitz_closure(b, lipschitz, pass_level, s0, g, m);
      const IndexMask reference = testing::oracle_closure(g, b, lipschitz, pass_level, s0);
      ++trials;
      if (via_fixed_point != reference || via_frontier != reference) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = mismatches == 0 && secs < 30.0;
  return {pass,
          fmt("2. closure operators match the brute-force fixed point: %zu grids x 50 "
              "bound vectors, %ld/%ld exact for both implementations, %.1f s (limit 30 s)",
              family.size(), trials - mismatches, trials, secs)};
}

// ---------------------------------------------------------------------------
// 3/4/5. Shared protocol: 50 seeded runs on the constrained 2-D landscape.
// ---------------------------------------------------------------------------

struct ProtocolOut {
  double secs = 0.0;
  long coat_violations = 0;
  int ucb_violating_seeds = 0;
  int n_seeds = 50;
  std::vector<RunSummary> summaries;
  std::vector<std::vector<RunRecord>> histories;
  long rounds_checked = 0;
  bool monotone_ok = true;
  std::string monotone_msg = "";
  // Exact references.
  double tau = 0.0;
  double eps = 0.0;
  double best_reachable = 0.0;
  std::function<double(std::int64_t)> q;
};

const ProtocolOut& protocol() {
  static const ProtocolOut out = [] {
    ProtocolOut p;
    const auto t0 = std::chrono::steady_clock::now();
    const auto& obj = synthetic_by_name("constrained2d");
    static const ParamGrid g({{0.0, 1.0, 100}, {0.0, 1.0, 100}});
    static const Metric m(g);
    static std::vector<double> q(g.size());
    for (std::int64_t i = 0; i < g.size(); ++i) q[i] = eval_synthetic_at(obj, g, i);
    p.q = [](std::int64_t i) { return q[i]; };

    TunerConfig tc;
    tc.kernel.variance = obj.default_kernel_variance;
    tc.kernel.lengthscale = 0.1;
    tc.gp_noise_var = 1e-6;  // noiseless protocol; GP keeps a stability floor
    tc.beta.value = 5.0;
    tc.lipschitz = obj.lipschitz_bound;
    tc.epsilon = obj.default_epsilon;
    tc.tau.value = obj.default_tau;
    tc.max_iters = 70;
    tc.true_q = p.q;
    p.tau = tc.tau.value;
    p.eps = tc.epsilon;

    const std::int64_t seed_idx = g.nearest_index({obj.default_seed[0], obj.default_seed[1]});
    const Evaluator eval = [&](std::int64_t i) { return EvalResult{q[i], false}; };

    const IndexMask reach = true_reachable_set(p.q, {seed_idx}, tc.lipschitz, tc.epsilon,
                                               tc.tau.value, g, m);
    p.best_reachable = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < g.size(); ++i)
      if (reach[i]) p.best_reachable = std::max(p.best_reachable, q[i]);

    for (int s = 0; s < p.n_seeds; ++s) {
      TunerState st = make_tuner_state(tc, g, m, {seed_idx});
      Eigen::VectorXd prev_l = st.cs.l, prev_u = st.cs.u;
      IndexMask prev_pess = st.ss.pess;
      std::size_t seen = 0;
      while (tuner_step(st, tc, g, m, eval)) {
        ++p.rounds_checked;
        for (std::int64_t i = 0; i < g.size() && p.monotone_ok; ++i) {
          if (st.cs.l[i] < prev_l[i])
            p.monotone_ok = false, p.monotone_msg = fmt("l decreased at index %lld", (long long)i);
          else if (st.cs.u[i] > prev_u[i])
            p.monotone_ok = false, p.monotone_msg = fmt("u increased at index %lld", (long long)i);
          else if (prev_pess[i] && !st.ss.pess[i])
            p.monotone_ok = false, p.monotone_msg = fmt("pess lost index %lld", (long long)i);
        }
        for (; seen < st.history.size(); ++seen) {
          if (!st.history[seen].in_pess && p.monotone_ok) {
            p.monotone_ok = false;
            p.monotone_msg = fmt("sample %d outside the certified set", st.history[seen].n);
          }
        }
        prev_l = st.cs.l;
        prev_u = st.cs.u;
        prev_pess = st.ss.pess;
      }
      for (const RunRecord& rec : st.history)
        if (q[rec.theta_index] < tc.tau.value) ++p.coat_violations;
      p.summaries.push_back(summarize_run(st, g));
      p.histories.push_back(st.history);
    }

    for (int s = 0; s < p.n_seeds; ++s) {
      const std::vector<RunRecord> hist = run_gp_ucb(tc, g, m, {seed_idx}, eval).first;
      bool violated = false;
      for (const RunRecord& rec : hist)
        if (q[rec.theta_index] < tc.tau.value) violated = true;
      if (violated) ++p.ucb_violating_seeds;
    }
    p.secs = seconds_since(t0);
    return p;
  }();
  return out;
}

Result c3_safety_contrast() {
  const ProtocolOut& p = protocol();
  const int need = (p.n_seeds * 8 + 9) / 10;
  const bool pass =
      p.coat_violations == 0 && p.ucb_violating_seeds >= need && p.secs < 300.0;
  return {pass,
          fmt("3. safety contrast on the constrained landscape: coat %ld violations "
              "across %d seeds (need 0); gp_ucb violated in %d/%d seeds (need >= %d); "
              "%.0f s (limit 300 s)",
              p.coat_violations, p.n_seeds, p.ucb_violating_seeds, p.n_seeds, need, p.secs)};
}

Result c4_near_optimality() {
  const ProtocolOut& p = protocol();
  int terminating = 0, near_opt = 0, before_budget = 0;
  std::vector<int> iters;
  for (const RunSummary& s : p.summaries) {
    iters.push_back(s.iterations_used);
    if (s.reason == StopReason::converged) {
      ++terminating;
      if (s.iterations_used < 70) ++before_budget;
      if (p.q(s.recommended_index) >= p.best_reachable - p.eps) ++near_opt;
    }
  }
  std::sort(iters.begin(), iters.end());
  const int median = iters.empty() ? 0 : iters[(iters.size() - 1) / 2];
  const bool opt_ok = terminating > 0 && near_opt * 100 >= terminating * 95;
  const bool term_ok = before_budget * 100 >= p.n_seeds * 90;
  const bool pass = opt_ok && term_ok && median <= 40;
  return {pass,
          fmt("4. near-optimality and termination: %d/%d terminating runs within eps of "
              "the reachable maximum (need >= 95%%); %d/%d terminated before 70 rounds "
              "(need >= 90%%); median %d rounds (limit 40)",
              near_opt, terminating, before_budget, p.n_seeds, median)};
}

Result c5_monotone_exploration() {
  const ProtocolOut& p = protocol();
  long samples = 0;
  for (const auto& h : p.histories) samples += static_cast<long>(h.size());
  return {p.monotone_ok,
          fmt("5. monotone certified exploration: lower bounds nondecreasing, upper "
              "bounds nonincreasing, certified set growing, all %ld samples certified "
              "at selection over %ld rounds%s%s",
              samples, p.rounds_checked, p.monotone_ok ? "" : " -- FIRST VIOLATION: ",
              p.monotone_ok ? "" : p.monotone_msg.c_str())};
}

// ---------------------------------------------------------------------------
// 6. Certified set inside the single-sweep whole-grid superset.
// ---------------------------------------------------------------------------

Result c6_superset() {
  const ParamGrid g({{0.0, 1.0, 16}, {0.0, 1.0, 16}});
  const Metric m(g);
  const std::int64_t n = g.size();
  int checked = 0, contained = 0;
  std::uint64_t t = 0;
  while (checked < 200) {
    Rng rng(6000, t++);
    ConfidenceState cs;
    cs.l = testing::random_vector(rng, n, -0.5, 1.0);
    cs.u = cs.l;
    for (std::int64_t i = 0; i < n; ++i) cs.u[i] += rng.uniform();
    cs.updates = 1;
    const double tau = -0.2 + 0.4 * rng.uniform();
    const double lipschitz = 0.5 + 2.5 * rng.uniform();
    IndexMask seed = testing::random_mask(rng, n, 0.05);
    for (std::int64_t i = 0; i < n; ++i)
      if (seed[i] && cs.l[i] < tau) seed[i] = 0;  // only currently safe anchors seed
    if (mask_count(seed) == 0) continue;

    const IndexMask pess = expand_fixed_point(
        [&](const IndexMask& s) { return pessimistic_step(s, cs, lipschitz, tau, g, m); },
        seed);
    const IndexMask sage = sage_pessimistic(cs, lipschitz, tau, g, m);
    bool subset = true;
    for (std::int64_t i = 0; i < n; ++i)
      if (pess[i] && !sage[i]) subset = false;
    ++checked;
    if (subset) ++contained;
  }
  return {contained == checked,
          fmt("6. certified set contained in the single-sweep superset in %d/%d "
              "randomized confidence states",
              contained, checked)};
}

// ---------------------------------------------------------------------------
// 7. Simulator tuning under the relative lap-time bound.
// ---------------------------------------------------------------------------

Result c7_simulator() {
  const auto t0 = std::chrono::steady_clock::now();
  const Track track = make_stadium_track(4.0, 1.0, 0.46, 24);
  const LapOutcome ref = simulate_lap(track, CarParams{}, 500.0, 500.0);
  if (ref.dnf || !std::isfinite(ref.seconds)) {
    return {false, fmt("7. simulator: reference lap at (500, 500) did not finish")};
  }

  const ExperimentConfig cfg =
      load_experiment_config(std::string(COAT_REPO_ROOT) + "/configs/sim_stadium_coat.conf");
  const ParamGrid g(cfg.axes);
  const Metric m(g);
  const TunerConfig tc = tuner_config_from(cfg);
  const std::vector<std::int64_t> seeds = seed_indices_for(cfg, g);

  int improved = 0, bound_breaks = 0;
  long accepted = 0;
  const int reps = cfg.repetitions;
  for (int r = 0; r < reps; ++r) {
    const Evaluator ev = make_evaluator(cfg, g, r);
    const auto [hist, sum] = run(tc, g, m, seeds, ev);
    // Performance is the negated lap time, so the improvement over the seed
    // lap is (best - first) relative to the seed's magnitude.
    if (std::isfinite(sum.first_y) && std::isfinite(sum.best_y) &&
        (sum.best_y - sum.first_y) / -sum.first_y >= 0.05) {
      ++improved;
    }
    for (const RunRecord& rec : hist) {
      if (rec.failed || !std::isfinite(rec.y)) continue;  // DNFs carry penalties, not laps
      ++accepted;
      if (!(std::isfinite(rec.tau) && rec.y >= rec.tau)) ++bound_breaks;
    }
  }
  const double secs = seconds_since(t0);
  const int need = (reps * 8 + 9) / 10;
  const bool pass = improved >= need && bound_breaks == 0;
  return {pass,
          fmt("7. simulator tuning: reference lap %.3f s finite; best lap improved "
              ">= 5%% over the seed lap in %d/%d seeds (need >= %d); %ld accepted laps, "
              "%d outside the relative bound (need 0); %.0f s",
              ref.seconds, improved, reps, need, accepted, bound_breaks, secs)};
}

// ---------------------------------------------------------------------------
// 8. Byte-identical repeated runs through the CLI entry point.
// ---------------------------------------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Result c8_determinism() {
  const std::string cfg = std::string(COAT_REPO_ROOT) + "/configs/quickstart.conf";
  const fs::path base = fs::temp_directory_path() / "coat_acceptance_rt";
  fs::remove_all(base);
  const std::string out_a = (base / "a").string(), out_b = (base / "b").string();
  TuneOptions opts;
  opts.config_path = cfg;
  opts.quiet = true;
  opts.out_dir = out_a;
  if (cmd_tune(opts) != 0) return {false, "8. byte-identical reruns: first invocation failed"};
  opts.out_dir = out_b;
  if (cmd_tune(opts) != 0) return {false, "8. byte-identical reruns: second invocation failed"};

  long files = 0, diffs = 0, bytes = 0;
  for (const char* f :
       {"/rep_000/iterations.csv", "/rep_001/iterations.csv", "/summary.json"}) {
    const std::string a = slurp(out_a + f), b = slurp(out_b + f);
    ++files;
    bytes += static_cast<long>(a.size());
    if (a.empty() || a != b) ++diffs;
  }
  return {diffs == 0,
          fmt("8. repeated tune invocations byte-identical: %ld files, %ld bytes "
              "compared, %ld differing (need 0)",
              files, bytes, diffs)};
}

}  // namespace

int main() {
  const std::vector<std::function<Result()>> criteria = {
      c1_gp_reference,  c2_closure_reference,    c3_safety_contrast,
      c4_near_optimality, c5_monotone_exploration, c6_superset,
      c7_simulator,     c8_determinism,
  };
  int failures = 0;
  for (const auto& run_criterion : criteria) {
    Result r;
    try {
      r = run_criterion();
    } catch (const std::exception& e) {
      r = {false, std::string("criterion raised: ") + e.what()};
    }
    if (!r.pass) ++failures;
    std::printf("[%s] %s\n", r.pass ? "PASS" : "FAIL", r.line.c_str());
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
  } else {
    std::printf("%d of %zu acceptance criteria FAILED\n", failures, criteria.size());
  }
  return failures;
}
