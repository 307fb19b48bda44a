#include "coat/sets.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace coat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lipschitz(double lipschitz) {
  // L = 0 is the degenerate constant-bound case: one qualifying anchor
  // reaches the whole grid. Experiment configs still require L > 0.
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz))
    throw std::invalid_argument("sets: Lipschitz constant must be finite and >= 0");
}

double reach_radius(double margin, double lipschitz) {
  return lipschitz > 0.0 ? margin / lipschitz : kInf;
}

/// Visits every grid point whose per-axis offset from `center` is at most
/// ceil(radius / spacing) + 1 cells, calling fn(flat_index, distance).
/// The box over-covers the ball, so callers re-test the exact inclusion
/// predicate; distances accumulate per dimension in ascending order, the
/// same order Metric uses.
template <class Fn>
void scan_ball(const ParamGrid& g, const Metric& m, std::int64_t center, double radius, Fn&& fn) {
  const int nd = g.dims();
  int cmulti[16];
  int lo[16];
  int hi[16];
  int cur[16];
  double acc[17];
  std::int64_t flat[17];
  g.index_to_multi(center, cmulti);
  for (int d = 0; d < nd; ++d) {
    const int count = g.axis(d).count;
    int hw = count - 1;
    if (count > 1) {
      const double cells = radius / g.spacing(d);
      if (cells < static_cast<double>(count)) hw = static_cast<int>(cells) + 1;
    }
    lo[d] = std::max(0, cmulti[d] - hw);
    hi[d] = std::min(count - 1, cmulti[d] + hw);
    cur[d] = lo[d];
  }
  acc[0] = 0.0;
  flat[0] = 0;
  for (int d = 0; d < nd; ++d) {
    const double dx = m.axis_coord(d, cur[d]) - m.axis_coord(d, cmulti[d]);
    acc[d + 1] = acc[d] + dx * dx;
    flat[d + 1] = flat[d] + g.stride(d) * cur[d];
  }
  while (true) {
    fn(flat[nd], std::sqrt(acc[nd]));
    int d = nd - 1;
    while (d >= 0 && cur[d] == hi[d]) {
      cur[d] = lo[d];
      --d;
    }
    if (d < 0) break;
    ++cur[d];
    for (int e = d; e < nd; ++e) {
      const double dx = m.axis_coord(e, cur[e]) - m.axis_coord(e, cmulti[e]);
      acc[e + 1] = acc[e] + dx * dx;
      flat[e + 1] = flat[e] + g.stride(e) * cur[e];
    }
  }
}

/// Shared single application: b is the anchor bound vector and `pass` the
/// qualifying threshold, i.e. a point joins when b(anchor) - L d >= pass.
IndexMask qualify_step(const IndexMask& s, const Eigen::VectorXd& b, double lipschitz,
                       double pass, const ParamGrid& g, const Metric& m) {
  const std::int64_t n = g.size();
  if (static_cast<std::int64_t>(s.size()) != n || b.size() != n)
    throw std::invalid_argument("sets: mask or bound size does not match grid");
  IndexMask out(s.size(), 0);
  for (std::int64_t a = 0; a < n; ++a) {
    if (!s[a]) continue;
    const double margin = b[a] - pass;
    if (!(margin >= 0.0)) continue;
    const double radius = reach_radius(margin, lipschitz);
    scan_ball(g, m, a, radius, [&](std::int64_t j, double dist) {
      if (!out[j] && b[a] - lipschitz * dist >= pass) out[j] = 1;
    });
  }
  return out;
}

}  // namespace

std::int64_t mask_count(const IndexMask& mask) {
  std::int64_t c = 0;
  for (std::uint8_t v : mask) c += (v != 0);
  return c;
}

IndexMask mask_from_indices(std::int64_t n, const std::vector<std::int64_t>& idx) {
  IndexMask out(static_cast<std::size_t>(n), 0);
  for (std::int64_t i : idx) {
    if (i < 0 || i >= n) throw std::out_of_range("sets: index outside grid");
    out[i] = 1;
  }
  return out;
}

ConfidenceState make_unbounded_confidence(std::int64_t n) {
  ConfidenceState cs;
  cs.l = Eigen::VectorXd::Constant(n, -kInf);
  cs.u = Eigen::VectorXd::Constant(n, kInf);
  return cs;
}

void update_bounds(ConfidenceState& cs, const Posterior& post, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("sets: beta must be > 0");
  if (post.mu.size() != cs.l.size() || post.sigma.size() != cs.l.size())
    throw std::invalid_argument("sets: posterior size does not match bounds");
  const double root = std::sqrt(beta);
  cs.l = cs.l.cwiseMax(post.mu - root * post.sigma);
  cs.u = cs.u.cwiseMin(post.mu + root * post.sigma);
  ++cs.updates;
}

void clamp_seed_lower(ConfidenceState& cs, const std::vector<std::int64_t>& seed, double tau) {
  for (std::int64_t i : seed) {
    if (i < 0 || i >= cs.l.size()) throw std::out_of_range("sets: seed index outside grid");
    if (cs.l[i] < tau) cs.l[i] = tau;
  }
}

SetState make_initial_sets(std::int64_t n, std::vector<std::int64_t> seed) {
  if (seed.empty()) throw std::invalid_argument("sets: seed set must be nonempty");
  SetState ss;
  ss.pess = mask_from_indices(n, seed);
  ss.opti.assign(static_cast<std::size_t>(n), 1);
  ss.seed = std::move(seed);
  ss.pess_count = mask_count(ss.pess);
  ss.opti_count = n;
  return ss;
}

IndexMask pessimistic_step(const IndexMask& s, const ConfidenceState& cs, double lipschitz,
                           double tau, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  return qualify_step(s, cs.l, lipschitz, tau, g, m);
}

IndexMask optimistic_step(const IndexMask& s, const ConfidenceState& cs, double lipschitz,
                          double eps, double tau, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  if (eps < 0.0) throw std::invalid_argument("sets: eps must be >= 0");
  return qualify_step(s, cs.u, lipschitz, tau + eps, g, m);
}

IndexMask expand_fixed_point(const std::function<IndexMask(const IndexMask&)>& step,
                             const IndexMask& s0) {
  IndexMask prev = step(s0);
  const std::int64_t cap = static_cast<std::int64_t>(s0.size()) + 1;
  for (std::int64_t round = 0; round < cap; ++round) {
    IndexMask next = step(prev);
    if (next == prev) return prev;
    prev = std::move(next);
  }
  throw std::runtime_error("sets: fixed-point iteration did not stabilize");
}

IndexMask lipschitz_closure(const Eigen::VectorXd& b, double lipschitz, double tau,
                            const IndexMask& s0, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  const std::int64_t n = g.size();
  if (static_cast<std::int64_t>(s0.size()) != n || b.size() != n)
    throw std::invalid_argument("sets: mask or bound size does not match grid");
  IndexMask result(s0.size(), 0);
  std::vector<double> slack(s0.size(), -kInf);
  std::deque<std::int64_t> queue;
  std::int64_t count = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    if (s0[i] && b[i] - tau >= 0.0) {
      result[i] = 1;
      ++count;
      queue.push_back(i);
    }
  }
  while (!queue.empty() && count < n) {
    const std::int64_t a = queue.front();
    queue.pop_front();
    const double radius = reach_radius(b[a] - tau, lipschitz);
    // A previously scanned ball that provably contains this one makes the
    // scan redundant; the margin keeps the skip strictly conservative.
    if (slack[a] >= radius + 1e-12 * (1.0 + radius)) continue;
    scan_ball(g, m, a, radius, [&](std::int64_t j, double dist) {
      if (b[a] - lipschitz * dist >= tau) {
        if (!result[j]) {
          result[j] = 1;
          ++count;
          if (b[j] - tau >= 0.0) queue.push_back(j);
        }
        const double s = radius - dist;
        if (s > slack[j]) slack[j] = s;
      }
    });
  }
  return result;
}

SetState update_sets(const SetState& ss, const ConfidenceState& cs, double lipschitz, double eps,
                     double tau, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  if (eps < 0.0) throw std::invalid_argument("sets: eps must be >= 0");
  const std::int64_t n = g.size();
  if (static_cast<std::int64_t>(ss.pess.size()) != n)
    throw std::invalid_argument("sets: state size does not match grid");
  SetState out;
  out.seed = ss.seed;
  out.pess = lipschitz_closure(cs.l, lipschitz, tau, ss.pess, g, m);
  for (std::int64_t i = 0; i < n; ++i)
    if (ss.pess[i]) out.pess[i] = 1;
  for (std::int64_t i : ss.seed) out.pess[i] = 1;
  out.opti = lipschitz_closure(cs.u, lipschitz, tau + eps, ss.pess, g, m);
  for (std::int64_t i = 0; i < n; ++i)
    if (out.pess[i]) out.opti[i] = 1;
  out.pess_count = mask_count(out.pess);
  out.opti_count = mask_count(out.opti);
  return out;
}

IndexMask sage_pessimistic(const ConfidenceState& cs, double lipschitz, double tau,
                           const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  IndexMask all(static_cast<std::size_t>(g.size()), 1);
  return qualify_step(all, cs.l, lipschitz, tau, g, m);
}

bool ball_reaches_outside(const IndexMask& inside, double bound, double lipschitz, double tau,
                          std::int64_t center, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  const double margin = bound - tau;
  if (!(margin >= 0.0)) return false;
  bool found = false;
  scan_ball(g, m, center, reach_radius(margin, lipschitz), [&](std::int64_t j, double dist) {
    if (!found && !inside[j] && bound - lipschitz * dist >= tau) found = true;
  });
  return found;
}

IndexMask true_reachable_set(const std::function<double(std::int64_t)>& q,
                             const std::vector<std::int64_t>& s0, double lipschitz, double eps,
                             double tau, const ParamGrid& g, const Metric& m) {
  check_lipschitz(lipschitz);
  if (eps < 0.0) throw std::invalid_argument("sets: eps must be >= 0");
  const std::int64_t n = g.size();
  Eigen::VectorXd b(n);
  for (std::int64_t i = 0; i < n; ++i) b[i] = q(i);
  return lipschitz_closure(b, lipschitz, tau + eps, mask_from_indices(n, s0), g, m);
}

}  // namespace coat
