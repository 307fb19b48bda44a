#include "coat/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "coat/bench/objectives.hpp"
#include "coat/gp.hpp"
#include "coat/io/config.hpp"
#include "coat/io/csv.hpp"
#include "coat/io/svg.hpp"
#include "coat/runner.hpp"
#include "coat/sets.hpp"

namespace coat {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int fail_cmd(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return 1;
}

/// JSON number or null -> double (null and missing become NaN).
double jnum(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

std::string rep_subdir(int r) {
  char sub[32];
  std::snprintf(sub, sizeof(sub), "rep_%03d", r);
  return sub;
}

struct LoadedRun {
  std::string dir;
  json summary;
  ExperimentConfig cfg;
  std::vector<IterationsCsv> reps;
};

LoadedRun load_run_dir(const std::string& dir) {
  LoadedRun run;
  run.dir = dir;
  const std::string sum_path = dir + "/summary.json";
  std::ifstream in(sum_path);
  if (!in) throw std::runtime_error("missing summary file '" + sum_path + "'");
  try {
    in >> run.summary;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse '" + sum_path + "': " + e.what());
  }
  run.cfg = load_experiment_config(dir + "/config.conf");
  const int reps = run.summary.at("repetitions").get<int>();
  for (int r = 0; r < reps; ++r) {
    run.reps.push_back(read_iterations_csv(dir + "/" + rep_subdir(r) + "/iterations.csv"));
  }
  return run;
}

std::vector<double> finite_measurements(const IterationsCsv& log) {
  std::vector<double> ys;
  for (const RunRecord& r : log.records) {
    if (std::isfinite(r.y)) ys.push_back(r.y);
  }
  return ys;
}

/// Mean cumulative-regret curve over repetitions; shorter (terminated) runs
/// hold their final value, since no further regret accrues.
std::vector<double> mean_regret_curve(const LoadedRun& run, double q_star) {
  std::vector<std::vector<double>> curves;
  std::size_t maxlen = 0;
  for (const IterationsCsv& rep : run.reps) {
    const std::vector<double> ys = finite_measurements(rep);
    if (ys.empty()) continue;
    curves.push_back(cumulative_regret(ys, q_star));
    maxlen = std::max(maxlen, curves.back().size());
  }
  std::vector<double> out;
  if (curves.empty()) return out;
  out.resize(maxlen, 0.0);
  for (std::size_t n = 0; n < maxlen; ++n) {
    double acc = 0.0;
    for (const auto& c : curves) acc += n < c.size() ? c[n] : c.back();
    out[n] = acc / static_cast<double>(curves.size());
  }
  return out;
}

/// Segments of the level set q = level over a 2-D grid, in pixel space.
/// Classic 16-case cell walk with linear edge interpolation; ambiguous
/// saddles use the default connection.
void draw_contour(SvgCanvas& svg, const ParamGrid& g,
                  const std::function<double(std::int64_t)>& q, double level,
                  const std::function<double(int)>& px_of_k0,
                  const std::function<double(int)>& py_of_k1) {
  const int n0 = g.axis(0).count, n1 = g.axis(1).count;
  const auto at = [&](int k0, int k1) {
    const int multi[2] = {k0, k1};
    return q(g.multi_to_index(multi));
  };
  for (int k0 = 0; k0 + 1 < n0; ++k0) {
    for (int k1 = 0; k1 + 1 < n1; ++k1) {
      const double v00 = at(k0, k1), v10 = at(k0 + 1, k1);
      const double v01 = at(k0, k1 + 1), v11 = at(k0 + 1, k1 + 1);
      int mask = 0;
      if (v00 >= level) mask |= 1;
      if (v10 >= level) mask |= 2;
      if (v11 >= level) mask |= 4;
      if (v01 >= level) mask |= 8;
      if (mask == 0 || mask == 15) continue;
      // Interpolated crossing points on the four cell edges.
      const double x0 = px_of_k0(k0), x1 = px_of_k0(k0 + 1);
      const double y0 = py_of_k1(k1), y1 = py_of_k1(k1 + 1);
      const auto lerp = [&](double a, double b, double va, double vb) {
        const double t = (level - va) / (vb - va);
        return a + std::clamp(t, 0.0, 1.0) * (b - a);
      };
      const double bx = lerp(x0, x1, v00, v10), by = y0;          // bottom edge
      const double tx = lerp(x0, x1, v01, v11), ty = y1;          // top edge
      const double lx = x0, lyp = lerp(y0, y1, v00, v01);         // left edge
      const double rx = x1, ryp = lerp(y0, y1, v10, v11);         // right edge
      const auto seg = [&](double ax, double ay, double bx2, double by2) {
        svg.line(ax, ay, bx2, by2, "#ff3333", 2.0);
      };
      switch (mask) {
        case 1: case 14: seg(lx, lyp, bx, by); break;
        case 2: case 13: seg(bx, by, rx, ryp); break;
        case 3: case 12: seg(lx, lyp, rx, ryp); break;
        case 4: case 11: seg(tx, ty, rx, ryp); break;
        case 6: case 9: seg(bx, by, tx, ty); break;
        case 7: case 8: seg(lx, lyp, tx, ty); break;
        case 5: seg(lx, lyp, bx, by); seg(tx, ty, rx, ryp); break;
        case 10: seg(bx, by, rx, ryp); seg(lx, lyp, tx, ty); break;
      }
    }
  }
}

}  // namespace

int cmd_tune(const TuneOptions& opts) {
  try {
    ExperimentConfig cfg = load_experiment_config(opts.config_path);
    if (opts.algorithm_override) cfg.algorithm = algorithm_from_string(*opts.algorithm_override);
    if (opts.seed_override) cfg.rng_seed = *opts.seed_override;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    const ExperimentOutput out = run_experiment(cfg, opts.quiet);
    write_experiment_outputs(cfg, out, cfg.out_dir);
    if (!opts.quiet) {
      int viol = 0, conv = 0;
      for (const auto& r : out.reps) {
        viol += r.summary.violations;
        conv += r.summary.converged ? 1 : 0;
      }
      std::printf("done: %d repetitions, %d converged, %d total violations -> %s\n",
                  static_cast<int>(out.reps.size()), conv, viol, cfg.out_dir.c_str());
    }
    return 0;
  } catch (const std::exception& e) {
    return fail_cmd(e.what());
  }
}

int cmd_compare(const CompareOptions& opts) {
  try {
    if (opts.run_dirs.size() < 2)
      throw std::runtime_error("compare: need at least 2 run directories");
    std::vector<LoadedRun> runs;
    for (const std::string& d : opts.run_dirs) runs.push_back(load_run_dir(d));

    const std::string objective = runs[0].summary.at("objective").get<std::string>();
    for (const LoadedRun& r : runs) {
      const std::string other = r.summary.at("objective").get<std::string>();
      if (other != objective)
        throw std::runtime_error("compare: objective mismatch: '" + runs[0].dir + "' ran " +
                                 objective + " but '" + r.dir + "' ran " + other +
                                 "; regret curves would not be comparable");
    }

    // Best-performance reference: exact for synthetic runs, otherwise the
    // best measurement seen across every compared run.
    double q_star = std::numeric_limits<double>::quiet_NaN();
    if (runs[0].summary.value("q_star_exact", false)) {
      q_star = jnum(runs[0].summary, "q_star");
    } else {
      for (const LoadedRun& r : runs) {
        for (const IterationsCsv& rep : r.reps) {
          for (double y : finite_measurements(rep)) {
            if (!(y <= q_star)) q_star = y;  // NaN-safe max
          }
        }
      }
    }

    struct Row {
      std::string dir, algorithm;
      int reps = 0;
      long total_violations = 0;
      double best_y = std::numeric_limits<double>::quiet_NaN();
      double mean_y = std::numeric_limits<double>::quiet_NaN();
      double std_y = std::numeric_limits<double>::quiet_NaN();
      double mean_iters = 0.0;
    };
    std::vector<Row> rows;
    for (const LoadedRun& r : runs) {
      Row row;
      row.dir = r.dir;
      row.algorithm = r.summary.at("algorithm").get<std::string>();
      row.reps = static_cast<int>(r.reps.size());
      double sum = 0.0, sum2 = 0.0;
      std::int64_t count = 0, iters = 0;
      for (const IterationsCsv& rep : r.reps) {
        iters += static_cast<std::int64_t>(rep.records.size());
        for (const RunRecord& rec : rep.records) {
          if (rec.violated) ++row.total_violations;
          if (!std::isfinite(rec.y)) continue;
          if (!(rec.y <= row.best_y)) row.best_y = rec.y;
          sum += rec.y;
          sum2 += rec.y * rec.y;
          ++count;
        }
      }
      if (count > 0) {
        row.mean_y = sum / count;
        row.std_y = std::sqrt(std::max(0.0, sum2 / count - row.mean_y * row.mean_y));
      }
      row.mean_iters = row.reps ? static_cast<double>(iters) / row.reps : 0.0;
      rows.push_back(row);
    }

    if (!opts.quiet) {
      std::printf("objective: %s   (reference q* = %s)\n", objective.c_str(),
                  format_double(q_star).c_str());
      std::printf("%-32s %-9s %5s %11s %10s %18s %11s\n", "run", "algorithm", "reps",
                  "violations", "best_y", "mean_y +/- std", "mean_iters");
      for (const Row& row : rows) {
        char meanbuf[64];
        std::snprintf(meanbuf, sizeof(meanbuf), "%.4f +/- %.4f", row.mean_y, row.std_y);
        std::printf("%-32s %-9s %5d %11ld %10.4f %18s %11.1f\n", row.dir.c_str(),
                    row.algorithm.c_str(), row.reps, row.total_violations, row.best_y, meanbuf,
                    row.mean_iters);
      }
    }

    fs::create_directories(opts.out_dir);
    {
      std::ofstream csv(opts.out_dir + "/compare.csv", std::ios::binary);
      if (!csv) throw std::runtime_error("compare: cannot write compare.csv");
      csv << "dir,algorithm,objective,repetitions,total_violations,best_y,mean_y,std_y,"
             "mean_iterations\n";
      for (const Row& row : rows) {
        csv << row.dir << ',' << row.algorithm << ',' << objective << ',' << row.reps << ','
            << row.total_violations << ',' << format_double(row.best_y) << ','
            << format_double(row.mean_y) << ',' << format_double(row.std_y) << ','
            << format_double(row.mean_iters) << "\n";
      }
    }

    std::vector<LineSeries> series;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      LineSeries s;
      s.label = runs[i].summary.at("algorithm").get<std::string>() + " (" + runs[i].dir + ")";
      s.color = series_color(static_cast<int>(i));
      s.ys = mean_regret_curve(runs[i], q_star);
      series.push_back(std::move(s));
    }
    const SvgCanvas chart = render_line_chart(800, 500, "Mean cumulative regret: " + objective,
                                              "iteration", "cumulative regret", series);
    chart.save(opts.out_dir + "/compare_regret.svg");
    if (!opts.quiet)
      std::printf("wrote %s/compare.csv and %s/compare_regret.svg\n", opts.out_dir.c_str(),
                  opts.out_dir.c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail_cmd(e.what());
  }
}

int cmd_heatmap(const HeatmapOptions& opts) {
  try {
    const ExperimentConfig cfg = load_experiment_config(opts.run_dir + "/config.conf");
    if (cfg.axes.size() != 2)
      throw std::runtime_error("heatmap: unsupported dimension " +
                               std::to_string(cfg.axes.size()) + " (only 2-D runs)");
    const IterationsCsv log =
        read_iterations_csv(opts.run_dir + "/" + rep_subdir(opts.repetition) + "/iterations.csv");
    if (log.records.empty()) throw std::runtime_error("heatmap: empty iteration log");

    const ParamGrid g(cfg.axes);
    const Metric metric(g);
    GpModel gp(cfg.kernel, std::max(cfg.noise_sigma * cfg.noise_sigma, 1e-6));
    double y_ref = 0.0;
    bool have_ref = false;
    for (const RunRecord& rec : log.records) {
      if (!std::isfinite(rec.y)) continue;
      if (!have_ref) {
        y_ref = rec.y;
        have_ref = true;
      }
      gp.add_observation(rec.theta_index, rec.y - y_ref);
    }
    const Posterior& post = gp.posterior(metric, g);

    const int W = 800, H = 800;
    const int n0 = cfg.axes[0].count, n1 = cfg.axes[1].count;
    const double cw = static_cast<double>(W) / n0, ch = static_cast<double>(H) / n1;
    // Pixel center of grid line k on each axis; axis 0 runs right, axis 1 up.
    const auto px_of_k0 = [&](int k0) { return (k0 + 0.5) * cw; };
    const auto py_of_k1 = [&](int k1) { return H - (k1 + 0.5) * ch; };

    SvgCanvas svg(W, H);
    double mn = post.mu.minCoeff(), mx = post.mu.maxCoeff();
    if (mx - mn < 1e-12) mx = mn + 1.0;
    for (std::int64_t idx = 0; idx < g.size(); ++idx) {
      int multi[2];
      g.index_to_multi(idx, multi);
      const double t = (post.mu[idx] - mn) / (mx - mn);
      // Slight overlap hides antialiasing seams between cells.
      svg.rect(multi[0] * cw, H - (multi[1] + 1) * ch, cw + 0.4, ch + 0.4, heat_color(t));
    }

    // True-threshold contour, available for synthetic objectives only.
    if (cfg.kind == ObjectiveKind::synthetic) {
      const SyntheticObjective& obj = synthetic_by_name(cfg.objective_name);
      const double tau_raw = log.records.back().tau;
      if (std::isfinite(tau_raw)) {
        draw_contour(
            svg, g, [&](std::int64_t idx) { return eval_synthetic_at(obj, g, idx); }, tau_raw,
            px_of_k0, py_of_k1);
      }
    }

    // Sample trajectory in measurement order.
    std::vector<std::pair<double, double>> traj;
    for (const RunRecord& rec : log.records) {
      int multi[2];
      g.index_to_multi(rec.theta_index, multi);
      traj.emplace_back(px_of_k0(multi[0]), py_of_k1(multi[1]));
    }
    svg.polyline(traj, "#ffffff", 1.6);
    for (const auto& [x, y] : traj) svg.circle(x, y, 2.2, "#ffffff");

    // Seed marker: the pinned first sample.  Best marker: highest finite y.
    svg.circle(traj.front().first, traj.front().second, 8.0, "none", "#ffffff", 2.5);
    std::size_t best_i = 0;
    double best_y = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log.records.size(); ++i) {
      if (std::isfinite(log.records[i].y) && log.records[i].y > best_y) {
        best_y = log.records[i].y;
        best_i = i;
      }
    }
    svg.circle(traj[best_i].first, traj[best_i].second, 6.0, "#ff3333", "#ffffff", 2.0);

    svg.text(12, 22, cfg.objective_spec + "  [" + to_string(cfg.algorithm) + "]", 15, "#ffffff");
    svg.text(12, 42,
             "samples: " + std::to_string(log.records.size()) +
                 "   posterior mean range: " + format_double(mn) + " .. " + format_double(mx),
             13, "#ffffff");

    const std::string out_path =
        opts.out_path.empty() ? opts.run_dir + "/heatmap.svg" : opts.out_path;
    svg.save(out_path);
    if (!opts.quiet) std::printf("wrote %s\n", out_path.c_str());
    return 0;
  } catch (const std::exception& e) {
    return fail_cmd(e.what());
  }
}

int cmd_oracle(const OracleOptions& opts) {
  try {
    const ExperimentConfig cfg = load_experiment_config(opts.config_path);
    if (cfg.kind != ObjectiveKind::synthetic)
      throw std::runtime_error("oracle: exact references exist only for synthetic objectives");
    const SyntheticObjective& obj = synthetic_by_name(cfg.objective_name);
    const ParamGrid g(cfg.axes);
    const Metric metric(g);
    const auto qf = [&](std::int64_t idx) { return eval_synthetic_at(obj, g, idx); };

    const std::vector<std::int64_t> seeds = seed_indices_for(cfg, g);
    const double tau = cfg.tau.is_scale ? make_tau(qf(seeds[0]), cfg.tau.value) : cfg.tau.value;

    const IndexMask reach =
        true_reachable_set(qf, seeds, cfg.lipschitz, cfg.epsilon, tau, g, metric);
    const GridMax global = grid_argmax(obj, g);
    std::int64_t best_idx = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < g.size(); ++i) {
      if (reach[i] && qf(i) > best_val) {
        best_val = qf(i);
        best_idx = i;
      }
    }

    const auto coords_str = [&](std::int64_t idx) {
      const std::vector<double> p = g.physical_coords(idx);
      std::string s = "(";
      for (std::size_t d = 0; d < p.size(); ++d) {
        if (d) s += ", ";
        s += format_double(p[d]);
      }
      return s + ")";
    };

    if (!opts.quiet) {
      std::printf("objective: %s  grid: %lld points  seed: %lld %s\n", cfg.objective_spec.c_str(),
                  static_cast<long long>(g.size()), static_cast<long long>(seeds[0]),
                  coords_str(seeds[0]).c_str());
      std::printf("tau = %s  epsilon = %s  L = %s\n", format_double(tau).c_str(),
                  format_double(cfg.epsilon).c_str(), format_double(cfg.lipschitz).c_str());
      std::printf("reachable set: %lld points\n", static_cast<long long>(mask_count(reach)));
      if (best_idx >= 0)
        std::printf("best reachable: index %lld %s q = %s\n", static_cast<long long>(best_idx),
                    coords_str(best_idx).c_str(), format_double(best_val).c_str());
      else
        std::printf("best reachable: none (reachable set is empty)\n");
      std::printf("global max: index %lld %s q = %s  reachable: %s\n",
                  static_cast<long long>(global.index), coords_str(global.index).c_str(),
                  format_double(global.value).c_str(), reach[global.index] ? "yes" : "no");
    }

    if (!opts.out_path.empty()) {
      nlohmann::ordered_json doc;
      doc["objective"] = cfg.objective_spec;
      doc["tau"] = tau;
      doc["epsilon"] = cfg.epsilon;
      doc["lipschitz"] = cfg.lipschitz;
      doc["seed_indices"] = seeds;
      doc["reachable_count"] = mask_count(reach);
      std::vector<std::int64_t> reach_idx;
      for (std::int64_t i = 0; i < g.size(); ++i)
        if (reach[i]) reach_idx.push_back(i);
      doc["reachable_indices"] = reach_idx;
      if (best_idx >= 0) {
        doc["best_reachable"] = {{"index", best_idx},
                                 {"coords", g.physical_coords(best_idx)},
                                 {"value", best_val}};
      } else {
        doc["best_reachable"] = nullptr;
      }
      doc["global_max"] = {{"index", global.index},
                           {"coords", g.physical_coords(global.index)},
                           {"value", global.value},
                           {"reachable", static_cast<bool>(reach[global.index])}};
      std::ofstream out(opts.out_path, std::ios::binary);
      if (!out) throw std::runtime_error("oracle: cannot write '" + opts.out_path + "'");
      out << doc.dump(2) << "\n";
      if (!opts.quiet) std::printf("wrote %s\n", opts.out_path.c_str());
    }
    return 0;
  } catch (const std::exception& e) {
    return fail_cmd(e.what());
  }
}

}  // namespace coat
