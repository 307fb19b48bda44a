#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "coat/gp.hpp"
#include "coat/grid.hpp"

namespace coat {

/// Membership mask over the grid, one byte per flat index.
using IndexMask = std::vector<std::uint8_t>;

std::int64_t mask_count(const IndexMask& mask);
IndexMask mask_from_indices(std::int64_t n, const std::vector<std::int64_t>& idx);

/// Running confidence interval per grid point. Bounds only ever tighten:
/// each update intersects the new +-sqrt(beta) sigma band with the previous
/// interval. Fresh states carry infinite sentinels so the first update
/// yields exactly mu -+ sqrt(beta) sigma.
struct ConfidenceState {
  Eigen::VectorXd l;
  Eigen::VectorXd u;
  int updates = 0;
};

ConfidenceState make_unbounded_confidence(std::int64_t n);
void update_bounds(ConfidenceState& cs, const Posterior& post, double beta);

/// Raises l to tau at the given indices. Applied once, to the seed set,
/// right after tau becomes known; u is never touched.
void clamp_seed_lower(ConfidenceState& cs, const std::vector<std::int64_t>& seed, double tau);

/// Pessimistic (certified-safe) and optimistic (possibly-reachable) index
/// sets plus the seed they grew from.
struct SetState {
  IndexMask pess;
  IndexMask opti;
  std::vector<std::int64_t> seed;
  std::int64_t pess_count = 0;
  std::int64_t opti_count = 0;
};

/// Initial state: pess = seed, opti = whole grid.
SetState make_initial_sets(std::int64_t n, std::vector<std::int64_t> seed);

/// One application of the pessimistic operator: a point qualifies when some
/// anchor theta' in s has l(theta') - L d(theta, theta') >= tau. Comparisons
/// are inclusive.
IndexMask pessimistic_step(const IndexMask& s, const ConfidenceState& cs, double lipschitz,
                           double tau, const ParamGrid& g, const Metric& m);

/// Optimistic analog using upper bounds with an epsilon haircut:
/// u(theta') - L d - eps >= tau.
IndexMask optimistic_step(const IndexMask& s, const ConfidenceState& cs, double lipschitz,
                          double eps, double tau, const ParamGrid& g, const Metric& m);

/// Limit of repeated applications of `step` starting from s0. Qualifying
/// operators grow monotonically after the first application, so on a finite
/// grid the limit is reached within one application per grid point; a
/// non-stabilizing callable triggers an exception at that cap.
IndexMask expand_fixed_point(const std::function<IndexMask(const IndexMask&)>& step,
                             const IndexMask& s0);

/// Transitive Lipschitz closure: every point reachable through anchor chains
/// b(anchor) - L d >= tau starting from s0. Equals
/// expand_fixed_point(one-step operator with bound vector b) but runs a
/// frontier queue with ball-domination pruning instead of whole-grid sweeps.
IndexMask lipschitz_closure(const Eigen::VectorXd& b, double lipschitz, double tau,
                            const IndexMask& s0, const ParamGrid& g, const Metric& m);

/// One safe-exploration round:
///   pess' = closure of the pessimistic operator from pess, union pess and seed;
///   opti' = closure of the optimistic operator from pess, union pess'.
/// Keeping the unions makes pess monotone over rounds and pess a subset of opti.
SetState update_sets(const SetState& ss, const ConfidenceState& cs, double lipschitz,
                     double eps, double tau, const ParamGrid& g, const Metric& m);

/// Single pessimistic application anchored on the whole grid. Reference
/// superset for the running pessimistic set; used by tests and diagnostics.
IndexMask sage_pessimistic(const ConfidenceState& cs, double lipschitz, double tau,
                           const ParamGrid& g, const Metric& m);

/// True when the Lipschitz cone anchored at `center` with bound value
/// `bound` reaches at least one point outside `inside`, i.e. exists j with
/// inside[j] == 0 and bound - L d(center, j) >= tau. Scans only the
/// feasible ball around the anchor.
bool ball_reaches_outside(const IndexMask& inside, double bound, double lipschitz, double tau,
                          std::int64_t center, const ParamGrid& g, const Metric& m);

/// Ground-truth reachability under the real objective: closure of
/// q(theta') - L d - eps >= tau from the seed. eps = 0 gives the plain
/// reachable set.
IndexMask true_reachable_set(const std::function<double(std::int64_t)>& q,
                             const std::vector<std::int64_t>& s0, double lipschitz, double eps,
                             double tau, const ParamGrid& g, const Metric& m);

}  // namespace coat
