#include "coat/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace coat {

namespace {
constexpr double kSqrt5 = 2.2360679774997896964091736687747;
}

double kernel_eval(const KernelParams& kp, double r) {
  if (!(kp.variance > 0.0)) throw std::invalid_argument("kernel: variance must be > 0");
  if (!(kp.lengthscale > 0.0)) throw std::invalid_argument("kernel: lengthscale must be > 0");
  if (r < 0.0) throw std::invalid_argument("kernel: distance must be >= 0");
  const double z = kSqrt5 * r / kp.lengthscale;
  return kp.variance * (1.0 + z + z * z / 3.0) * std::exp(-z);
}

double beta_at(const BetaSchedule& b, int n) {
  if (n < 1) throw std::invalid_argument("beta: round index must be >= 1");
  if (b.mode == BetaSchedule::Mode::fixed) {
    if (!(b.value > 0.0)) throw std::invalid_argument("beta: fixed value must be > 0");
    return b.value;
  }
  if (!b.capacity) throw std::invalid_argument("beta: theoretical mode needs a capacity bound");
  if (!(b.delta > 0.0 && b.delta < 1.0))
    throw std::invalid_argument("beta: delta must be in (0, 1)");
  const double gamma = b.capacity(n);
  if (gamma < 0.0) throw std::invalid_argument("beta: capacity bound must be >= 0");
  const double root =
      b.rkhs_bound + 4.0 * b.noise_sigma * std::sqrt(gamma + 1.0 + std::log(1.0 / b.delta));
  return root * root;
}

GpModel::GpModel(KernelParams kp, double noise_var) : kp_(kp), noise_var_(noise_var) {
  if (!(kp_.variance > 0.0)) throw std::invalid_argument("gp: variance must be > 0");
  if (!(kp_.lengthscale > 0.0)) throw std::invalid_argument("gp: lengthscale must be > 0");
  if (!(noise_var_ > 0.0)) throw std::invalid_argument("gp: noise variance must be > 0");
}

void GpModel::add_observation(std::int64_t theta_idx, double y) {
  if (theta_idx < 0) throw std::invalid_argument("gp: observation index must be >= 0");
  if (!std::isfinite(y)) throw std::invalid_argument("gp: observation value must be finite");
  obs_idx_.push_back(theta_idx);
  obs_y_.push_back(y);
}

void GpModel::kernel_column(const Metric& m, const ParamGrid& g, std::int64_t idx,
                            Eigen::VectorXd& out) const {
  const int nd = g.dims();
  int center[16];
  int cur[16];
  if (nd > 16) throw std::invalid_argument("gp: more than 16 dimensions");
  g.index_to_multi(idx, center);
  for (int d = 0; d < nd; ++d) cur[d] = 0;
  out.resize(g.size());
  // Odometer walk in flat-index order; per-dimension squared offsets are
  // updated only when that digit changes.
  double acc[17];
  acc[0] = 0.0;
  for (int d = 0; d < nd; ++d) {
    const double dx = m.axis_coord(d, 0) - m.axis_coord(d, center[d]);
    acc[d + 1] = acc[d] + dx * dx;
  }
  std::int64_t j = 0;
  const std::int64_t n = g.size();
  while (true) {
    out[j] = kernel_eval(kp_, std::sqrt(acc[nd]));
    if (++j >= n) break;
    int d = nd - 1;
    while (true) {
      if (++cur[d] < g.axis(d).count) {
        const double dx = m.axis_coord(d, cur[d]) - m.axis_coord(d, center[d]);
        acc[d + 1] = acc[d] + dx * dx;
        for (int e = d + 1; e < nd; ++e) {
          const double dy = m.axis_coord(e, 0) - m.axis_coord(e, center[e]);
          acc[e + 1] = acc[e] + dy * dy;
        }
        break;
      }
      cur[d] = 0;
      --d;
    }
  }
}

void GpModel::rebuild(const Metric& m, const ParamGrid& g) const {
  const int k = num_observations();
  const std::int64_t n = g.size();
  // Failed factorizations escalate the extra diagonal: 1e-8 * variance,
  // then x10 per retry, three retries total.
  const double base_jitter = 1e-8 * kp_.variance;
  double jitter = jitter_;
  for (int attempt = 0;; ++attempt) {
    Eigen::MatrixXd kmat(k, k);
    Eigen::MatrixXd kstar(k, n);
    Eigen::VectorXd col;
    for (int i = 0; i < k; ++i) {
      kernel_column(m, g, obs_idx_[i], col);
      kstar.row(i) = col.transpose();
      for (int j = 0; j <= i; ++j) {
        const double v = col[obs_idx_[j]];
        kmat(i, j) = v;
        kmat(j, i) = v;
      }
      kmat(i, i) = kp_.variance + noise_var_ + jitter;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(kmat);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      vmat_ = chol_.triangularView<Eigen::Lower>().solve(kstar);
      wvec_ = chol_.triangularView<Eigen::Lower>().solve(
          Eigen::Map<const Eigen::VectorXd>(obs_y_.data(), k));
      mu_acc_ = vmat_.transpose() * wvec_;
      s2_acc_ = vmat_.colwise().squaredNorm().transpose();
      jitter_ = jitter;
      built_ = k;
      cache_grid_ = &g;
      return;
    }
    if (attempt >= 3) throw std::runtime_error("gp: covariance factorization failed");
    jitter = (jitter == 0.0) ? base_jitter : jitter * 10.0;
  }
}

bool GpModel::try_append(const Metric& m, const ParamGrid& g, int i) const {
  const std::int64_t n = g.size();
  Eigen::VectorXd col;
  kernel_column(m, g, obs_idx_[i], col);
  Eigen::VectorXd kobs(i);
  for (int j = 0; j < i; ++j) kobs[j] = col[obs_idx_[j]];
  Eigen::VectorXd b;
  if (i > 0)
    b = chol_.topLeftCorner(i, i).triangularView<Eigen::Lower>().solve(kobs);
  else
    b.resize(0);
  const double kappa = kp_.variance + noise_var_ + jitter_;
  const double d2 = kappa - b.squaredNorm();
  // Same guard LLT uses internally, scaled: a pivot this small means the new
  // row is numerically dependent and the factorization should be redone.
  if (!(d2 > 1e-12 * kappa)) return false;
  const double d = std::sqrt(d2);

  chol_.conservativeResize(i + 1, i + 1);
  chol_.row(i).head(i) = b.transpose();
  chol_.col(i).head(i).setZero();
  chol_(i, i) = d;

  Eigen::RowVectorXd vrow;
  if (i > 0)
    vrow = (col.transpose() - b.transpose() * vmat_) / d;
  else
    vrow = col.transpose() / d;
  vmat_.conservativeResize(i + 1, n);
  vmat_.row(i) = vrow;

  double wnew = obs_y_[i];
  if (i > 0) wnew -= b.dot(wvec_.head(i));
  wnew /= d;
  wvec_.conservativeResize(i + 1);
  wvec_[i] = wnew;

  mu_acc_ += wnew * vrow.transpose();
  s2_acc_ += vrow.array().square().matrix().transpose();
  built_ = i + 1;
  return true;
}

const Posterior& GpModel::posterior(const Metric& m, const ParamGrid& g) const {
  const std::int64_t n = g.size();
  if (cache_grid_ != &g) {
    cache_grid_ = nullptr;
    built_ = 0;
    jitter_ = 0.0;
  }
  if (num_observations() == 0) {
    post_.mu = Eigen::VectorXd::Zero(n);
    post_.sigma = Eigen::VectorXd::Constant(n, std::sqrt(kp_.variance));
    return post_;
  }
  if (cache_grid_ == nullptr) {
    mu_acc_ = Eigen::VectorXd::Zero(n);
    s2_acc_ = Eigen::VectorXd::Zero(n);
    chol_.resize(0, 0);
    vmat_.resize(0, n);
    wvec_.resize(0);
    cache_grid_ = &g;
  }
  while (built_ < num_observations()) {
    if (!try_append(m, g, built_)) rebuild(m, g);
  }
  post_.mu = mu_acc_;
  post_.sigma = (kp_.variance - s2_acc_.array()).max(0.0).sqrt().matrix();
  return post_;
}

}  // namespace coat
