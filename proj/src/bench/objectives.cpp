#include "coat/bench/objectives.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coat {

namespace {

std::vector<SyntheticObjective> build_registry() {
  std::vector<SyntheticObjective> reg;

  // Feasible island around the seed, a sub-threshold band, and a taller
  // peak on the far side. The peak baits unconstrained acquisition across
  // the band while staying unreachable under the threshold.
  SyntheticObjective constrained;
  constrained.name = "constrained2d";
  constrained.dims = 2;
  constrained.base = -0.3;
  constrained.bumps = {
      {{0.22, 0.26}, 1.3, 0.10},
      {{0.76, 0.72}, 2.3, 0.09},
  };
  constrained.lipschitz_bound = 16.0;
  constrained.default_tau = 0.0;
  constrained.default_seed = {0.18, 0.32};
  constrained.default_kernel_variance = 0.21;
  constrained.default_epsilon = 0.5;
  reg.push_back(constrained);

  SyntheticObjective smooth;
  smooth.name = "smooth2d";
  smooth.dims = 2;
  smooth.base = -0.2;
  smooth.bumps = {
      {{0.62, 0.48}, 1.4, 0.24},
  };
  smooth.lipschitz_bound = 3.8;
  smooth.default_tau = 0.0;
  smooth.default_seed = {0.35, 0.35};
  smooth.default_kernel_variance = 0.6;
  smooth.default_epsilon = 0.35;
  reg.push_back(smooth);

  SyntheticObjective bump1d;
  bump1d.name = "bump1d";
  bump1d.dims = 1;
  bump1d.base = -0.5;
  bump1d.bumps = {
      {{0.65}, 1.5, 0.12},
  };
  bump1d.lipschitz_bound = 8.0;
  bump1d.default_tau = 0.0;
  bump1d.default_seed = {0.5};
  bump1d.default_kernel_variance = 0.5;
  bump1d.default_epsilon = 0.35;
  reg.push_back(bump1d);

  return reg;
}

const std::vector<SyntheticObjective>& registry() {
  static const std::vector<SyntheticObjective> reg = build_registry();
  return reg;
}

}  // namespace

double eval_synthetic(const SyntheticObjective& obj, const double* x) {
  double v = obj.base;
  for (const GaussBump& b : obj.bumps) {
    double d2 = 0.0;
    for (int d = 0; d < obj.dims; ++d) {
      const double dx = x[d] - b.center[d];
      d2 += dx * dx;
    }
    v += b.height * std::exp(-d2 / (2.0 * b.width * b.width));
  }
  return v;
}

double eval_synthetic(const SyntheticObjective& obj, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != obj.dims)
    throw std::invalid_argument("synthetic: point has wrong dimension");
  return eval_synthetic(obj, x.data());
}

double eval_synthetic_at(const SyntheticObjective& obj, const ParamGrid& g, std::int64_t idx) {
  if (g.dims() != obj.dims) throw std::invalid_argument("synthetic: grid has wrong dimension");
  double x[16];
  g.index_to_coords(idx, x);
  return eval_synthetic(obj, x);
}

const SyntheticObjective& synthetic_by_name(const std::string& name) {
  for (const SyntheticObjective& o : registry())
    if (o.name == name) return o;
  throw std::invalid_argument("synthetic: unknown objective '" + name + "'");
}

std::vector<std::string> synthetic_names() {
  std::vector<std::string> names;
  for (const SyntheticObjective& o : registry()) names.push_back(o.name);
  return names;
}

double make_tau(double y_seed, double tau_scale) {
  if (!(tau_scale >= 1.0)) throw std::invalid_argument("make_tau: tau scale must be >= 1");
  return tau_scale * y_seed;
}

std::vector<double> cumulative_regret(const std::vector<double>& y, double q_star) {
  std::vector<double> out(y.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    acc += q_star - y[i];
    out[i] = acc;
  }
  return out;
}

GridMax grid_argmax(const SyntheticObjective& obj, const ParamGrid& g) {
  GridMax best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < g.size(); ++i) {
    const double v = eval_synthetic_at(obj, g, i);
    if (v > best.value) {
      best.value = v;
      best.index = i;
    }
  }
  return best;
}

}  // namespace coat
