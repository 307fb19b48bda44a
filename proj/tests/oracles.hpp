#pragma once

// Reference implementations shared by the unit suites and the acceptance
// runner.  Everything here recomputes results through deliberately simple
// second routes -- dense linear solves and whole-grid sweeps -- so the
// production paths (incremental Cholesky, frontier-queue closure with ball
// pruning) are checked against independent arithmetic rather than against
// themselves.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coat/gp.hpp"
#include "coat/grid.hpp"
#include "coat/rng.hpp"
#include "coat/sets.hpp"

namespace coat::testing {

// ---------------------------------------------------------------------------
// Geometry
// ---------------------------------------------------------------------------

/// Normalized Euclidean distance recomputed from the grid axes, accumulating
/// per-dimension squares in ascending dimension order (the documented
/// accumulation order, so boundary comparisons agree bit-for-bit).
inline double oracle_distance(const ParamGrid& g, std::int64_t i, std::int64_t j) {
  int mi[16];
  int mj[16];
  g.index_to_multi(i, mi);
  g.index_to_multi(j, mj);
  double acc = 0.0;
  for (int d = 0; d < g.dims(); ++d) {
    const double dx = g.axis_coord(d, mi[d]) - g.axis_coord(d, mj[d]);
    acc += dx * dx;
  }
  return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// Gaussian process
// ---------------------------------------------------------------------------

/// Matern 5/2 covariance written out locally.
inline double oracle_kernel(double variance, double lengthscale, double r) {
  const double z = std::sqrt(5.0) * r / lengthscale;
  return variance * (1.0 + z + z * z / 3.0) * std::exp(-z);
}

struct OraclePosterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
};

/// Dense-solve reference posterior: builds the full covariance against the
/// observations, factors (K + noise I) with LDLT -- a different
/// factorization than the production incremental-LLT path -- and solves for
/// mean and variance at every grid point from scratch.
inline OraclePosterior oracle_posterior(const ParamGrid& g, const KernelParams& kp,
                                        double noise_var,
                                        const std::vector<std::int64_t>& idx,
                                        const std::vector<double>& y) {
  const std::int64_t n = g.size();
  const int k = static_cast<int>(idx.size());
  OraclePosterior out;
  if (k == 0) {
    out.mu = Eigen::VectorXd::Zero(n);
    out.sigma = Eigen::VectorXd::Constant(n, std::sqrt(kp.variance));
    return out;
  }
  Eigen::MatrixXd kmat(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      kmat(a, b) = oracle_kernel(kp.variance, kp.lengthscale,
                                 oracle_distance(g, idx[a], idx[b]));
  kmat.diagonal().array() += noise_var;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(kmat);
  const Eigen::VectorXd alpha =
      ldlt.solve(Eigen::Map<const Eigen::VectorXd>(y.data(), k));
  out.mu.resize(n);
  out.sigma.resize(n);
  Eigen::VectorXd kstar(k);
  for (std::int64_t j = 0; j < n; ++j) {
    for (int a = 0; a < k; ++a)
      kstar[a] = oracle_kernel(kp.variance, kp.lengthscale,
                               oracle_distance(g, idx[a], j));
    out.mu[j] = kstar.dot(alpha);
    const double s2 = kp.variance - kstar.dot(ldlt.solve(kstar));
    out.sigma[j] = std::sqrt(std::max(0.0, s2));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Set expansion
// ---------------------------------------------------------------------------

/// One whole-grid sweep of the qualifying operator: j joins when some anchor
/// a in s has b[a] - L d(a, j) >= pass.  Quadratic scan over every
/// (anchor, point) pair; no pruning, no frontier.
inline IndexMask oracle_qualify_sweep(const ParamGrid& g, const Eigen::VectorXd& b,
                                      double lipschitz, double pass, const IndexMask& s) {
  const std::int64_t n = g.size();
  IndexMask out(static_cast<std::size_t>(n), 0);
  for (std::int64_t a = 0; a < n; ++a) {
    if (!s[a]) continue;
    for (std::int64_t j = 0; j < n; ++j) {
      if (!out[j] && b[a] - lipschitz * oracle_distance(g, a, j) >= pass) out[j] = 1;
    }
  }
  return out;
}

/// Brute-force transitive closure: repeated whole-grid sweeps until the mask
/// stabilizes.  Mirrors the fixed-point definition literally (the operator
/// is applied at least once, so seeds that fail the threshold and are not
/// re-qualified by another anchor drop out).  `sweeps`, when given, receives
/// the number of sweeps needed to reach the fixed point.
inline IndexMask oracle_closure(const ParamGrid& g, const Eigen::VectorXd& b,
                                double lipschitz, double pass, const IndexMask& s0,
                                int* sweeps = nullptr) {
  IndexMask cur = oracle_qualify_sweep(g, b, lipschitz, pass, s0);
  int used = 1;
  while (true) {
    IndexMask next = oracle_qualify_sweep(g, b, lipschitz, pass, cur);
    if (next == cur) break;
    cur = std::move(next);
    ++used;
  }
  if (sweeps) *sweeps = used;
  return cur;
}

// ---------------------------------------------------------------------------
// Random cases
// ---------------------------------------------------------------------------

/// Axis specs for a family of grids spanning 1-4 dimensions, every grid at
/// most `max_points` points.  Includes degenerate single-value axes and
/// non-unit physical ranges.
inline std::vector<std::vector<GridAxis>> grid_family(std::int64_t max_points) {
  std::vector<std::vector<GridAxis>> all = {
      {{0.0, 1.0, 2}},
      {{0.0, 1.0, 3}},
      {{0.0, 1000.0, 11}},
      {{-5.0, 5.0, 101}},
      {{0.0, 1.0, 500}},
      {{0.0, 1.0, 1}, {0.0, 1.0, 25}},
      {{0.0, 10.0, 3}, {0.0, 1.0, 7}},
      {{0.0, 1.0, 22}, {0.0, 1.0, 22}},
      {{0.0, 1000.0, 10}, {-1.0, 1.0, 50}},
      {{0.0, 1.0, 5}, {0.0, 1.0, 5}, {0.0, 1.0, 5}},
      {{0.0, 2.0, 7}, {0.0, 1.0, 8}, {1.0, 3.0, 8}},
      {{0.0, 1.0, 3}, {0.0, 1.0, 3}, {0.0, 1.0, 3}, {0.0, 1.0, 3}},
      {{0.0, 1.0, 4}, {0.0, 1.0, 4}, {0.0, 1.0, 5}, {0.0, 1.0, 6}},
  };
  std::vector<std::vector<GridAxis>> out;
  for (auto& axes : all) {
    std::int64_t total = 1;
    for (const auto& ax : axes) total *= ax.count;
    if (total <= max_points) out.push_back(std::move(axes));
  }
  return out;
}

inline Eigen::VectorXd random_vector(Rng& rng, std::int64_t n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (std::int64_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

/// Random membership mask with at least one member.
inline IndexMask random_mask(Rng& rng, std::int64_t n, double density) {
  IndexMask mask(static_cast<std::size_t>(n), 0);
  for (std::int64_t i = 0; i < n; ++i) mask[i] = rng.uniform() < density ? 1 : 0;
  mask[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)) %
       static_cast<std::size_t>(n)] = 1;
  return mask;
}

inline std::vector<std::int64_t> mask_to_indices(const IndexMask& mask) {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out.push_back(static_cast<std::int64_t>(i));
  return out;
}

}  // namespace coat::testing
