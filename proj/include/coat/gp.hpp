#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "coat/grid.hpp"

namespace coat {

/// Matern nu=5/2 family; only amplitude and a shared isotropic lengthscale
/// are free. Hyperparameters are fixed up front, never learned online.
struct KernelParams {
  double variance = 1.0;
  double lengthscale = 0.1;
};

/// Covariance at normalized distance r >= 0. k(0) == variance exactly and
/// the value decays monotonically in r.
double kernel_eval(const KernelParams& kp, double r);

/// Confidence multiplier schedule. `fixed` returns a constant beta.
/// `theoretical` evaluates sqrt(beta_n) = B + 4 sigma sqrt(gamma(n) + 1 +
/// ln(1/delta)) from a caller-supplied nondecreasing capacity bound gamma.
struct BetaSchedule {
  enum class Mode { fixed, theoretical };
  Mode mode = Mode::fixed;
  double value = 5.0;

  double rkhs_bound = 1.0;
  double noise_sigma = 0.1;
  double delta = 0.1;
  std::function<double(int)> capacity;
};

/// beta for round n (1-based). Throws on n < 1 or an inconsistent schedule.
double beta_at(const BetaSchedule& b, int n);

/// Dense posterior over every grid point.
struct Posterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;
};

/// Exact GP regression on grid-resident inputs with Gaussian observation
/// noise. Observations are folded in through an incremental Cholesky
/// extension, so adding one sample and refreshing the dense posterior costs
/// O(n |D|) instead of a full refit; a refit happens automatically when the
/// factorization degrades (see jitter notes in the .cpp).
class GpModel {
 public:
  GpModel(KernelParams kp, double noise_var);

  const KernelParams& kernel() const { return kp_; }
  double noise_var() const { return noise_var_; }
  int num_observations() const { return static_cast<int>(obs_idx_.size()); }
  const std::vector<std::int64_t>& observed_indices() const { return obs_idx_; }
  const std::vector<double>& observed_values() const { return obs_y_; }

  void add_observation(std::int64_t theta_idx, double y);

  /// Posterior mean and standard deviation at every point of g. The result
  /// reference stays valid until the next non-const call.
  const Posterior& posterior(const Metric& m, const ParamGrid& g) const;

 private:
  void rebuild(const Metric& m, const ParamGrid& g) const;
  bool try_append(const Metric& m, const ParamGrid& g, int i) const;
  void kernel_column(const Metric& m, const ParamGrid& g, std::int64_t idx,
                     Eigen::VectorXd& out) const;

  KernelParams kp_;
  double noise_var_;
  std::vector<std::int64_t> obs_idx_;
  std::vector<double> obs_y_;

  // Posterior cache, keyed to the grid it was built against.
  mutable const ParamGrid* cache_grid_ = nullptr;
  mutable int built_ = 0;             // observations folded into the cache
  mutable double jitter_ = 0.0;       // extra diagonal added after failures
  mutable Eigen::MatrixXd chol_;      // lower Cholesky of K + (noise+jitter) I
  mutable Eigen::MatrixXd vmat_;      // L^-1 K_*, one row per observation
  mutable Eigen::VectorXd wvec_;      // L^-1 y
  mutable Eigen::VectorXd mu_acc_;    // V^T w
  mutable Eigen::VectorXd s2_acc_;    // columnwise |V|^2
  mutable Posterior post_;
};

inline void add_observation(GpModel& gp, std::int64_t theta_idx, double y) {
  gp.add_observation(theta_idx, y);
}

inline const Posterior& posterior(const GpModel& gp, const Metric& m, const ParamGrid& g) {
  return gp.posterior(m, g);
}

}  // namespace coat
