#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coat/grid.hpp"
#include "coat/rng.hpp"

namespace coat {

/// Isotropic Gaussian bump height * exp(-|x - center|^2 / (2 width^2)) on
/// normalized coordinates.
struct GaussBump {
  std::vector<double> center;
  double height = 1.0;
  double width = 0.1;
};

/// Fixed, versioned synthetic landscape: a constant base plus Gaussian
/// bumps. `lipschitz_bound` upper-bounds the gradient norm everywhere (each
/// bump's steepest slope is height / (width sqrt(e)), and slopes add at
/// most constructively).
struct SyntheticObjective {
  std::string name;
  int dims = 2;
  double base = 0.0;
  std::vector<GaussBump> bumps;
  double lipschitz_bound = 1.0;
  double default_tau = 0.0;
  std::vector<double> default_seed;  // normalized coordinates
  // Config defaults used when the experiment file does not override them.
  double default_kernel_variance = 1.0;
  double default_epsilon = 0.4;
};

/// Objective value at a normalized point.
double eval_synthetic(const SyntheticObjective& obj, const std::vector<double>& x);
double eval_synthetic(const SyntheticObjective& obj, const double* x);

/// Value at a grid point.
double eval_synthetic_at(const SyntheticObjective& obj, const ParamGrid& g, std::int64_t idx);

/// Registry of bundled objectives: "constrained2d" (feasible island around
/// the seed, an infeasible band, and a taller peak beyond it), "smooth2d"
/// (one broad bump, mostly feasible), "bump1d" (single 1-D bump).
const SyntheticObjective& synthetic_by_name(const std::string& name);
std::vector<std::string> synthetic_names();

/// Additive Gaussian measurement noise.
struct NoiseModel {
  double sigma = 0.05;
  double sample(Rng& rng) const { return sigma == 0.0 ? 0.0 : sigma * rng.gaussian(); }
};

/// Threshold from the first seed measurement: tau = tau_scale * y_seed.
/// Meant for negative performance values (negated lap seconds), hence the
/// scale must be >= 1 so the threshold sits at or below the seed level.
double make_tau(double y_seed, double tau_scale);

/// Running sums of (q_star - y_i).
std::vector<double> cumulative_regret(const std::vector<double>& y, double q_star);

/// Exhaustive scan: best value and its index over the whole grid.
struct GridMax {
  std::int64_t index = -1;
  double value = 0.0;
};
GridMax grid_argmax(const SyntheticObjective& obj, const ParamGrid& g);

}  // namespace coat
