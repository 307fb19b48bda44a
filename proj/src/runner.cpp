#include "coat/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "coat/baselines.hpp"
#include "coat/bench/objectives.hpp"
#include "coat/bench/simulator.hpp"
#include "coat/bench/track.hpp"
#include "coat/io/csv.hpp"
#include "coat/io/svg.hpp"
#include "coat/rng.hpp"

namespace coat {

namespace {

using ordered_json = nlohmann::ordered_json;

/// NaN/inf have no JSON representation; emit null instead.
ordered_json json_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Track build_track(const std::string& name) {
  if (name == "stadium") return make_stadium_track(4.0, 1.0, 0.46, 24);
  return load_track_csv(name);
}

int worker_count(int repetitions) {
  int n = 0;
  if (const char* env = std::getenv("COAT_TUNER_THREADS")) {
    n = std::atoi(env);
    if (n < 1) throw std::runtime_error("COAT_TUNER_THREADS must be a positive integer");
  } else {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n < 1) n = 1;
  }
  return std::min(n, repetitions);
}

}  // namespace

std::vector<std::int64_t> seed_indices_for(const ExperimentConfig& cfg, const ParamGrid& g) {
  std::vector<std::int64_t> seeds;
  for (const auto& p : cfg.seed_points) {
    const std::int64_t idx = g.nearest_index(p);
    if (std::find(seeds.begin(), seeds.end(), idx) == seeds.end()) seeds.push_back(idx);
  }
  return seeds;
}

TunerConfig tuner_config_from(const ExperimentConfig& cfg) {
  TunerConfig tc;
  tc.kernel = cfg.kernel;
  // The GP needs a strictly positive observation-noise variance even for
  // noiseless benchmark runs; the floor keeps the factorization stable.
  tc.gp_noise_var = std::max(cfg.noise_sigma * cfg.noise_sigma, 1e-6);
  tc.beta = cfg.beta;
  tc.lipschitz = cfg.lipschitz;
  tc.epsilon = cfg.epsilon;
  tc.tau = cfg.tau;
  tc.max_iters = cfg.max_iters;
  tc.eval_noise_sigma = cfg.noise_sigma;
  return tc;
}

Evaluator make_evaluator(const ExperimentConfig& cfg, const ParamGrid& g, int repetition) {
  auto rng = std::make_shared<Rng>(cfg.rng_seed, static_cast<std::uint64_t>(repetition));
  const NoiseModel noise{cfg.noise_sigma};
  if (cfg.kind == ObjectiveKind::synthetic) {
    const SyntheticObjective* obj = &synthetic_by_name(cfg.objective_name);
    return [obj, &g, noise, rng](std::int64_t idx) -> EvalResult {
      return {eval_synthetic_at(*obj, g, idx) + noise.sample(*rng), false};
    };
  }
  auto track = std::make_shared<Track>(build_track(cfg.objective_name));
  const CarParams params;
  return [track, params, &g, noise, rng](std::int64_t idx) -> EvalResult {
    const std::vector<double> w = g.physical_coords(idx);
    const LapOutcome lap = simulate_lap(*track, params, w[0], w[1]);
    if (lap.dnf) return {0.0, true};
    return {-lap.seconds + noise.sample(*rng), false};
  };
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, bool quiet) {
  const ParamGrid g(cfg.axes);
  const Metric metric(g);
  const std::vector<std::int64_t> seeds = seed_indices_for(cfg, g);
  if (seeds.empty()) throw std::runtime_error("runner: no seed points resolved");

  TunerConfig tc = tuner_config_from(cfg);
  const SyntheticObjective* obj = nullptr;
  if (cfg.kind == ObjectiveKind::synthetic) {
    obj = &synthetic_by_name(cfg.objective_name);
    tc.true_q = [obj, &g](std::int64_t idx) { return eval_synthetic_at(*obj, g, idx); };
  }

  ExperimentOutput out;
  out.reps.resize(cfg.repetitions);

  std::atomic<int> next{0};
  std::mutex io_mutex;
  std::exception_ptr first_error;

  const auto work = [&]() {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= cfg.repetitions) return;
      try {
        const Evaluator ev = make_evaluator(cfg, g, r);
        std::pair<std::vector<RunRecord>, RunSummary> res;
        switch (cfg.algorithm) {
          case Algorithm::coat: res = run(tc, g, metric, seeds, ev); break;
          case Algorithm::gp_ucb: res = run_gp_ucb(tc, g, metric, seeds, ev); break;
          case Algorithm::safe_opt: res = run_safe_opt(tc, g, metric, seeds, ev); break;
        }
        out.reps[r].history = std::move(res.first);
        out.reps[r].summary = res.second;
        if (!quiet) {
          std::lock_guard<std::mutex> lock(io_mutex);
          std::printf("rep %03d: %s after %d iterations, best %s, violations %d\n", r,
                      to_string(res.second.reason), res.second.iterations_used,
                      format_double(res.second.best_y).c_str(), res.second.violations);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(io_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = worker_count(cfg.repetitions);
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  if (obj) {
    out.q_star = grid_argmax(*obj, g).value;
    out.q_star_exact = true;
  } else {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& rep : out.reps) {
      for (const RunRecord& rec : rep.history) {
        if (!rec.failed && std::isfinite(rec.y) && !(rec.y <= best)) best = rec.y;
      }
    }
    out.q_star = best;
    out.q_star_exact = false;
  }
  return out;
}

void write_experiment_outputs(const ExperimentConfig& cfg, const ExperimentOutput& out,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream snap(out_dir + "/config.conf", std::ios::binary);
    if (!snap) throw std::runtime_error("runner: cannot write config snapshot in " + out_dir);
    snap << render_experiment_config(cfg);
  }

  const int dims = static_cast<int>(cfg.axes.size());
  for (std::size_t r = 0; r < out.reps.size(); ++r) {
    char sub[32];
    std::snprintf(sub, sizeof(sub), "rep_%03zu", r);
    const std::string rep_dir = out_dir + "/" + sub;
    fs::create_directories(rep_dir);
    write_iterations_csv(rep_dir + "/iterations.csv", out.reps[r].history, dims,
                         cfg.log_wall_ms);
  }

  ordered_json doc;
  doc["objective"] = cfg.objective_spec;
  doc["algorithm"] = to_string(cfg.algorithm);
  doc["repetitions"] = cfg.repetitions;
  doc["rng_seed"] = cfg.rng_seed;
  {
    ordered_json grid;
    std::vector<double> lo, hi;
    std::vector<int> count;
    for (const GridAxis& a : cfg.axes) {
      lo.push_back(a.lo);
      hi.push_back(a.hi);
      count.push_back(a.count);
    }
    grid["lo"] = lo;
    grid["hi"] = hi;
    grid["count"] = count;
    doc["grid"] = grid;
  }
  doc["kernel"] = {{"variance", cfg.kernel.variance}, {"lengthscale", cfg.kernel.lengthscale}};
  doc["noise_sigma"] = cfg.noise_sigma;
  doc["epsilon"] = cfg.epsilon;
  doc["lipschitz"] = cfg.lipschitz;
  doc["tau_policy"] = {{"is_scale", cfg.tau.is_scale}, {"value", cfg.tau.value}};
  doc["max_iters"] = cfg.max_iters;
  doc["q_star"] = json_num(out.q_star);
  doc["q_star_exact"] = out.q_star_exact;

  ordered_json reps = ordered_json::array();
  double sum_viol = 0, sum_iters = 0, sum_min = 0, sum_mean = 0, sum_best = 0;
  int n_converged = 0, n_with_data = 0;
  std::vector<int> iters_list;
  for (const RepetitionOutput& rep : out.reps) {
    const RunSummary& s = rep.summary;
    ordered_json j;
    j["iterations"] = s.iterations_used;
    j["converged"] = s.converged;
    j["reason"] = to_string(s.reason);
    j["violations"] = s.violations;
    j["min_y"] = json_num(s.min_y);
    j["mean_y"] = json_num(s.mean_y);
    j["std_y"] = json_num(s.std_y);
    j["best_y"] = json_num(s.best_y);
    j["first_y"] = json_num(s.first_y);
    j["tau"] = json_num(s.tau);
    j["recommended_index"] = s.recommended_index;
    j["recommended_coords"] = s.recommended_coords;
    reps.push_back(j);

    sum_viol += s.violations;
    sum_iters += s.iterations_used;
    iters_list.push_back(s.iterations_used);
    if (s.converged) ++n_converged;
    if (std::isfinite(s.min_y)) {
      sum_min += s.min_y;
      sum_mean += s.mean_y;
      sum_best += s.best_y;
      ++n_with_data;
    }
  }
  doc["reps"] = reps;

  std::sort(iters_list.begin(), iters_list.end());
  const int n = static_cast<int>(out.reps.size());
  ordered_json agg;
  agg["total_violations"] = sum_viol;
  agg["mean_violations"] = sum_viol / n;
  agg["mean_iterations"] = sum_iters / n;
  agg["median_iterations"] = iters_list.empty() ? 0 : iters_list[(iters_list.size() - 1) / 2];
  agg["converged_fraction"] = static_cast<double>(n_converged) / n;
  agg["mean_min_y"] = n_with_data ? json_num(sum_min / n_with_data) : ordered_json(nullptr);
  agg["mean_mean_y"] = n_with_data ? json_num(sum_mean / n_with_data) : ordered_json(nullptr);
  agg["mean_best_y"] = n_with_data ? json_num(sum_best / n_with_data) : ordered_json(nullptr);
  doc["aggregate"] = agg;

  {
    std::ofstream js(out_dir + "/summary.json", std::ios::binary);
    if (!js) throw std::runtime_error("runner: cannot write summary.json in " + out_dir);
    js << doc.dump(2) << "\n";
  }

  // Cumulative regret per repetition (skipping repetitions with no finite
  // measurements, e.g. an immediately failed seed).
  std::vector<LineSeries> series;
  for (std::size_t r = 0; r < out.reps.size(); ++r) {
    std::vector<double> ys;
    for (const RunRecord& rec : out.reps[r].history) {
      if (std::isfinite(rec.y)) ys.push_back(rec.y);
    }
    if (ys.empty() || !std::isfinite(out.q_star)) continue;
    LineSeries s;
    s.label = series.size() < 8 ? ("rep " + std::to_string(r)) : "";
    s.color = series_color(static_cast<int>(r));
    s.ys = cumulative_regret(ys, out.q_star);
    series.push_back(std::move(s));
  }
  const SvgCanvas chart = render_line_chart(
      800, 500, "Cumulative regret (" + to_string(cfg.algorithm) + ")", "iteration",
      "cumulative regret", series);
  chart.save(out_dir + "/regret.svg");
}

}  // namespace coat
