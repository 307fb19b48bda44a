#include "coat/io/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coat/bench/objectives.hpp"
#include "coat/io/csv.hpp"

namespace coat {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("config: line " + std::to_string(line) + ": " + msg);
}

/// Parsed key=value file with consumption tracking so leftover (unknown)
/// keys can be reported with their line numbers.
class KvFile {
 public:
  explicit KvFile(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) fail(lineno, "empty key");
      if (value.empty()) fail(lineno, "empty value for key '" + key + "'");
      const auto [it, inserted] = kv_.emplace(key, Entry{value, lineno});
      if (!inserted) {
        fail(lineno, "duplicate key '" + key + "' (first at line " +
                          std::to_string(it->second.line) + ")");
      }
    }
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  /// Returns the raw value and marks the key consumed.
  std::string take(const std::string& key, int* line = nullptr) {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::logic_error("take of absent key " + key);
    it->second.used = true;
    if (line) *line = it->second.line;
    return it->second.value;
  }

  double take_double(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    return parse_double(v, line, key);
  }

  std::int64_t take_int(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    return parse_int(v, line, key);
  }

  std::uint64_t take_uint64(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    try {
      // stoull would silently wrap a negative value; reject it outright.
      if (v.find('-') != std::string::npos) throw std::invalid_argument("");
      std::size_t pos = 0;
      const unsigned long long r = std::stoull(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("");
      return static_cast<std::uint64_t>(r);
    } catch (const std::exception&) {
      fail(line, "key '" + key + "': expected unsigned integer, got '" + v + "'");
    }
  }

  bool take_bool(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(line, "key '" + key + "': expected true/false, got '" + v + "'");
  }

  std::vector<double> take_double_list(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    return parse_double_list(v, line, key);
  }

  /// "x, y ; x, y" -> list of points.
  std::vector<std::vector<double>> take_points(const std::string& key) {
    int line = 0;
    const std::string v = take(key, &line);
    std::vector<std::vector<double>> pts;
    std::size_t start = 0;
    while (start <= v.size()) {
      const auto semi = v.find(';', start);
      const std::string part =
          v.substr(start, semi == std::string::npos ? std::string::npos : semi - start);
      if (!trim(part).empty()) pts.push_back(parse_double_list(part, line, key));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    if (pts.empty()) fail(line, "key '" + key + "': no points given");
    return pts;
  }

  int line_of(const std::string& key) const { return kv_.at(key).line; }

  /// Throws if any key was never consumed.
  void reject_unknown() const {
    for (const auto& [key, e] : kv_) {
      if (!e.used) fail(e.line, "unknown key '" + key + "'");
    }
  }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  static double parse_double(const std::string& v, int line, const std::string& key) {
    try {
      std::size_t pos = 0;
      const double r = std::stod(v, &pos);
      if (trim(v.substr(pos)) != "") throw std::invalid_argument("");
      return r;
    } catch (const std::exception&) {
      fail(line, "key '" + key + "': expected number, got '" + v + "'");
    }
  }

  static std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
    try {
      std::size_t pos = 0;
      const long long r = std::stoll(v, &pos);
      if (trim(v.substr(pos)) != "") throw std::invalid_argument("");
      return static_cast<std::int64_t>(r);
    } catch (const std::exception&) {
      fail(line, "key '" + key + "': expected integer, got '" + v + "'");
    }
  }

  static std::vector<double> parse_double_list(const std::string& v, int line,
                                               const std::string& key) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= v.size()) {
      const auto comma = v.find(',', start);
      const std::string part =
          v.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      const std::string p = trim(part);
      if (p.empty()) fail(line, "key '" + key + "': empty list element");
      out.push_back(parse_double(p, line, key));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (out.empty()) fail(line, "key '" + key + "': empty list");
    return out;
  }

  std::map<std::string, Entry> kv_;
};

/// Built-in capacity surrogate for the theoretical confidence schedule:
/// gamma(n) = dims * ln(n + 1), nondecreasing and zero at n = 0.
std::function<double(int)> capacity_surrogate(int dims) {
  return [dims](int n) { return dims * std::log(static_cast<double>(n) + 1.0); };
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::coat: return "coat";
    case Algorithm::gp_ucb: return "gp_ucb";
    case Algorithm::safe_opt: return "safe_opt";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "coat") return Algorithm::coat;
  if (s == "gp_ucb") return Algorithm::gp_ucb;
  if (s == "safe_opt") return Algorithm::safe_opt;
  throw std::runtime_error("config: unknown algorithm '" + s +
                           "' (expected coat, gp_ucb, or safe_opt)");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  KvFile kv(text);
  ExperimentConfig cfg;

  // Objective first: it supplies the defaults for most other keys.
  if (!kv.has("objective")) throw std::runtime_error("config: missing required key 'objective'");
  int obj_line = 0;
  cfg.objective_spec = kv.take("objective", &obj_line);
  const SyntheticObjective* obj = nullptr;
  int dims = 2;
  if (cfg.objective_spec.rfind("synthetic:", 0) == 0) {
    cfg.kind = ObjectiveKind::synthetic;
    cfg.objective_name = cfg.objective_spec.substr(10);
    try {
      obj = &synthetic_by_name(cfg.objective_name);
    } catch (const std::exception& e) {
      fail(obj_line, e.what());
    }
    dims = obj->dims;
  } else if (cfg.objective_spec.rfind("sim:", 0) == 0) {
    cfg.kind = ObjectiveKind::simulator;
    cfg.objective_name = cfg.objective_spec.substr(4);
    if (cfg.objective_name.empty()) fail(obj_line, "empty track in objective 'sim:'");
    dims = 2;
  } else {
    fail(obj_line, "objective must be synthetic:<name> or sim:<track>, got '" +
                       cfg.objective_spec + "'");
  }

  if (kv.has("algorithm")) {
    int line = 0;
    const std::string a = kv.take("algorithm", &line);
    try {
      cfg.algorithm = algorithm_from_string(a);
    } catch (const std::exception& e) {
      fail(line, e.what());
    }
  }

  // Grid: per-dimension lo/hi/count, defaulting to [0,1000] with 100 points.
  std::vector<double> lo(dims, 0.0), hi(dims, 1000.0);
  std::vector<std::int64_t> count(dims, 100);
  if (kv.has("grid.lo")) {
    const auto v = kv.take_double_list("grid.lo");
    if (static_cast<int>(v.size()) != dims)
      fail(kv.line_of("grid.lo"), "grid.lo needs " + std::to_string(dims) + " entries");
    lo = v;
  }
  if (kv.has("grid.hi")) {
    const auto v = kv.take_double_list("grid.hi");
    if (static_cast<int>(v.size()) != dims)
      fail(kv.line_of("grid.hi"), "grid.hi needs " + std::to_string(dims) + " entries");
    hi = v;
  }
  if (kv.has("grid.count")) {
    const int line = kv.line_of("grid.count");
    const auto v = kv.take_double_list("grid.count");
    if (static_cast<int>(v.size()) != dims)
      fail(line, "grid.count needs " + std::to_string(dims) + " entries");
    count.clear();
    for (double c : v) {
      if (!(c >= 1.0) || c != std::floor(c)) fail(line, "grid.count entries must be integers >= 1");
      count.push_back(static_cast<std::int64_t>(c));
    }
  }
  for (int d = 0; d < dims; ++d) {
    if (!(lo[d] < hi[d]) && count[d] > 1)
      throw std::runtime_error("config: grid axis " + std::to_string(d) + " has lo >= hi");
    cfg.axes.push_back(GridAxis{lo[d], hi[d], static_cast<int>(count[d])});
  }

  cfg.kernel.variance = obj ? obj->default_kernel_variance : 0.75;
  if (kv.has("kernel.variance")) cfg.kernel.variance = kv.take_double("kernel.variance");
  if (!(cfg.kernel.variance > 0.0)) throw std::runtime_error("config: kernel.variance must be > 0");
  cfg.kernel.lengthscale = 0.1;
  if (kv.has("kernel.lengthscale")) cfg.kernel.lengthscale = kv.take_double("kernel.lengthscale");
  if (!(cfg.kernel.lengthscale > 0.0))
    throw std::runtime_error("config: kernel.lengthscale must be > 0");

  cfg.noise_sigma = obj ? 0.05 : 0.02;
  if (kv.has("noise.sigma")) cfg.noise_sigma = kv.take_double("noise.sigma");
  if (!(cfg.noise_sigma >= 0.0)) throw std::runtime_error("config: noise.sigma must be >= 0");

  cfg.beta.mode = BetaSchedule::Mode::fixed;
  cfg.beta.value = 5.0;
  if (kv.has("beta.mode")) {
    int line = 0;
    const std::string m = kv.take("beta.mode", &line);
    if (m == "fixed") {
      cfg.beta.mode = BetaSchedule::Mode::fixed;
    } else if (m == "theoretical") {
      cfg.beta.mode = BetaSchedule::Mode::theoretical;
    } else {
      fail(line, "beta.mode must be fixed or theoretical, got '" + m + "'");
    }
  }
  if (kv.has("beta.value")) cfg.beta.value = kv.take_double("beta.value");
  if (cfg.beta.mode == BetaSchedule::Mode::fixed) {
    if (!(cfg.beta.value > 0.0)) throw std::runtime_error("config: beta.value must be > 0");
  } else {
    if (!kv.has("beta.rkhs_bound") || !kv.has("beta.delta"))
      throw std::runtime_error(
          "config: beta.mode=theoretical requires beta.rkhs_bound and beta.delta");
    cfg.beta.rkhs_bound = kv.take_double("beta.rkhs_bound");
    cfg.beta.delta = kv.take_double("beta.delta");
    cfg.beta.noise_sigma = cfg.noise_sigma;
    if (kv.has("beta.noise_sigma")) cfg.beta.noise_sigma = kv.take_double("beta.noise_sigma");
    if (!(cfg.beta.delta > 0.0 && cfg.beta.delta < 1.0))
      throw std::runtime_error("config: beta.delta must be in (0,1)");
    if (!(cfg.beta.rkhs_bound > 0.0))
      throw std::runtime_error("config: beta.rkhs_bound must be > 0");
    cfg.beta.capacity = capacity_surrogate(dims);
  }

  cfg.epsilon = obj ? obj->default_epsilon : 0.35;
  if (kv.has("epsilon")) cfg.epsilon = kv.take_double("epsilon");
  if (!(cfg.epsilon >= 0.0)) throw std::runtime_error("config: epsilon must be >= 0");

  cfg.lipschitz = obj ? obj->lipschitz_bound : 12.0;
  if (kv.has("lipschitz.L")) cfg.lipschitz = kv.take_double("lipschitz.L");
  if (!(cfg.lipschitz > 0.0)) throw std::runtime_error("config: lipschitz.L must be > 0");

  const bool has_tau = kv.has("constraint.tau");
  const bool has_scale = kv.has("constraint.tau_scale");
  if (has_tau && has_scale)
    throw std::runtime_error(
        "config: constraint.tau and constraint.tau_scale are mutually exclusive");
  if (has_tau) {
    cfg.tau = TauPolicy{false, kv.take_double("constraint.tau")};
  } else if (has_scale) {
    cfg.tau = TauPolicy{true, kv.take_double("constraint.tau_scale")};
  } else if (obj) {
    cfg.tau = TauPolicy{false, obj->default_tau};
  } else {
    cfg.tau = TauPolicy{true, 1.3};
  }
  if (cfg.tau.is_scale && !(cfg.tau.value >= 1.0))
    throw std::runtime_error("config: constraint.tau_scale must be >= 1");

  if (kv.has("max_iters")) {
    cfg.max_iters = static_cast<int>(kv.take_int("max_iters"));
    if (cfg.max_iters < 1) throw std::runtime_error("config: max_iters must be >= 1");
  }
  if (kv.has("repetitions")) {
    cfg.repetitions = static_cast<int>(kv.take_int("repetitions"));
    if (cfg.repetitions < 1) throw std::runtime_error("config: repetitions must be >= 1");
  }
  if (kv.has("rng_seed")) cfg.rng_seed = kv.take_uint64("rng_seed");

  if (kv.has("seed.points")) {
    cfg.seed_points = kv.take_points("seed.points");
    const int line = kv.line_of("seed.points");
    for (const auto& p : cfg.seed_points) {
      if (static_cast<int>(p.size()) != dims)
        fail(line, "seed point needs " + std::to_string(dims) + " coordinates");
      for (int d = 0; d < dims; ++d) {
        if (p[d] < cfg.axes[d].lo || p[d] > cfg.axes[d].hi)
          fail(line, "seed point coordinate " + std::to_string(d) + " outside the grid range");
      }
    }
  } else if (obj) {
    std::vector<double> p(dims);
    for (int d = 0; d < dims; ++d)
      p[d] = cfg.axes[d].lo + obj->default_seed[d] * (cfg.axes[d].hi - cfg.axes[d].lo);
    cfg.seed_points = {p};
  } else {
    std::vector<double> p(dims);
    for (int d = 0; d < dims; ++d) p[d] = 0.5 * (cfg.axes[d].lo + cfg.axes[d].hi);
    cfg.seed_points = {p};
  }

  if (kv.has("out_dir")) cfg.out_dir = kv.take("out_dir");
  if (kv.has("log.wall_ms")) cfg.log_wall_ms = kv.take_bool("log.wall_ms");

  kv.reject_unknown();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_experiment_config(buf.str());
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string(e.what()) + " [" + path + "]");
  }
}

std::string render_experiment_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "algorithm = " << to_string(cfg.algorithm) << "\n";
  out << "objective = " << cfg.objective_spec << "\n";
  auto list = [&](auto get) {
    std::string s;
    for (std::size_t d = 0; d < cfg.axes.size(); ++d) {
      if (d) s += ", ";
      s += get(cfg.axes[d]);
    }
    return s;
  };
  out << "grid.lo = " << list([](const GridAxis& a) { return format_double(a.lo); }) << "\n";
  out << "grid.hi = " << list([](const GridAxis& a) { return format_double(a.hi); }) << "\n";
  out << "grid.count = " << list([](const GridAxis& a) { return std::to_string(a.count); })
      << "\n";
  out << "kernel.variance = " << format_double(cfg.kernel.variance) << "\n";
  out << "kernel.lengthscale = " << format_double(cfg.kernel.lengthscale) << "\n";
  out << "noise.sigma = " << format_double(cfg.noise_sigma) << "\n";
  if (cfg.beta.mode == BetaSchedule::Mode::fixed) {
    out << "beta.mode = fixed\n";
    out << "beta.value = " << format_double(cfg.beta.value) << "\n";
  } else {
    out << "beta.mode = theoretical\n";
    out << "beta.rkhs_bound = " << format_double(cfg.beta.rkhs_bound) << "\n";
    out << "beta.noise_sigma = " << format_double(cfg.beta.noise_sigma) << "\n";
    out << "beta.delta = " << format_double(cfg.beta.delta) << "\n";
  }
  out << "epsilon = " << format_double(cfg.epsilon) << "\n";
  out << "lipschitz.L = " << format_double(cfg.lipschitz) << "\n";
  if (cfg.tau.is_scale) {
    out << "constraint.tau_scale = " << format_double(cfg.tau.value) << "\n";
  } else {
    out << "constraint.tau = " << format_double(cfg.tau.value) << "\n";
  }
  out << "max_iters = " << cfg.max_iters << "\n";
  out << "repetitions = " << cfg.repetitions << "\n";
  out << "rng_seed = " << cfg.rng_seed << "\n";
  std::string pts;
  for (std::size_t i = 0; i < cfg.seed_points.size(); ++i) {
    if (i) pts += "; ";
    for (std::size_t d = 0; d < cfg.seed_points[i].size(); ++d) {
      if (d) pts += ", ";
      pts += format_double(cfg.seed_points[i][d]);
    }
  }
  out << "seed.points = " << pts << "\n";
  out << "out_dir = " << cfg.out_dir << "\n";
  out << "log.wall_ms = " << (cfg.log_wall_ms ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace coat
