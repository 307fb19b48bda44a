#include "coat/bench/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace coat {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool nearly_same_point(double ax, double ay, double bx, double by) {
  return std::hypot(ax - bx, ay - by) < 1e-9;
}

}  // namespace

Track::Track(std::vector<double> xs, std::vector<double> ys, double width)
    : xs_(std::move(xs)), ys_(std::move(ys)), width_(width) {
  if (xs_.size() != ys_.size()) {
    throw std::invalid_argument("track: x/y waypoint counts differ");
  }
  if (!(width_ > 0.0)) {
    throw std::invalid_argument("track: width must be positive");
  }
  if (xs_.size() >= 2 &&
      nearly_same_point(xs_.front(), ys_.front(), xs_.back(), ys_.back())) {
    xs_.pop_back();
    ys_.pop_back();
  }
  const std::size_t n = xs_.size();
  if (n < 3) {
    throw std::invalid_argument("track: need at least 3 distinct waypoints");
  }
  seg_len_.resize(n);
  heading_.resize(n);
  cum_len_.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double dx = xs_[j] - xs_[i];
    const double dy = ys_[j] - ys_[i];
    const double len = std::hypot(dx, dy);
    if (!(len > 1e-12)) {
      throw std::invalid_argument("track: duplicate adjacent waypoints");
    }
    cum_len_[i] = acc;
    seg_len_[i] = len;
    heading_[i] = std::atan2(dy, dx);
    acc += len;
  }
  total_len_ = acc;
}

double Track::wrap(double s) const {
  double r = std::fmod(s, total_len_);
  if (r < 0.0) r += total_len_;
  return r;
}

std::size_t Track::segment_at(double s) const {
  // Last cum_len_ entry <= s.  cum_len_ is strictly increasing from 0.
  const auto it = std::upper_bound(cum_len_.begin(), cum_len_.end(), s);
  const std::size_t idx = static_cast<std::size_t>(it - cum_len_.begin());
  return idx == 0 ? 0 : idx - 1;
}

void Track::position(double s, double* x, double* y) const {
  const double sw = wrap(s);
  const std::size_t i = segment_at(sw);
  const std::size_t j = (i + 1) % xs_.size();
  const double t = (sw - cum_len_[i]) / seg_len_[i];
  *x = xs_[i] + t * (xs_[j] - xs_[i]);
  *y = ys_[i] + t * (ys_[j] - ys_[i]);
}

double Track::heading(double s) const { return heading_[segment_at(wrap(s))]; }

TrackProjection Track::project(double x, double y, double hint, double back,
                               double forward) const {
  const std::size_t n = xs_.size();
  // Enumerate segments whose arc range intersects [hint - back, hint + forward].
  // The window is assumed to span less than one lap; we walk segments starting
  // at the segment containing (hint - back) and accumulate unwrapped arc.
  const double lo = hint - back;
  const double span = back + forward;
  const double lo_w = wrap(lo);
  std::size_t seg = segment_at(lo_w);
  // Unwrapped arc length at the start of `seg` on the winding containing lo.
  double seg_start = lo - (lo_w - cum_len_[seg]);

  TrackProjection best;
  best.distance = std::numeric_limits<double>::infinity();
  double covered = 0.0;
  while (covered < span + seg_len_[seg]) {
    const std::size_t j = (seg + 1) % n;
    const double ax = xs_[seg], ay = ys_[seg];
    const double dx = xs_[j] - ax, dy = ys_[j] - ay;
    const double len = seg_len_[seg];
    double t = ((x - ax) * dx + (y - ay) * dy) / (len * len);
    t = std::clamp(t, 0.0, 1.0);
    const double px = ax + t * dx, py = ay + t * dy;
    const double ex = x - px, ey = y - py;
    const double dist = std::hypot(ex, ey);
    if (dist < best.distance) {
      best.distance = dist;
      best.arc = seg_start + t * len;
      // Signed lateral offset: positive to the left of the travel direction.
      best.lateral = (dx * ey - dy * ex) / len;
    }
    covered += len;
    seg_start += len;
    seg = j;
  }
  return best;
}

Track load_track_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("track: cannot open '" + path + "'");
  }
  std::vector<double> xs, ys;
  double width = -1.0;
  bool saw_header = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Trim whitespace and skip blanks/comments.
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    std::string body = line.substr(first, last - first + 1);
    if (body[0] == '#') continue;

    const auto comma = body.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("track: line " + std::to_string(lineno) +
                               ": expected 'a,b'");
    }
    const std::string a = body.substr(0, comma);
    const std::string b = body.substr(comma + 1);
    if (a == "width") {
      width = std::stod(b);
      continue;
    }
    if (a == "x_m") {
      if (b != "y_m") {
        throw std::runtime_error("track: line " + std::to_string(lineno) +
                                 ": expected header 'x_m,y_m'");
      }
      saw_header = true;
      continue;
    }
    if (!saw_header) {
      throw std::runtime_error("track: line " + std::to_string(lineno) +
                               ": waypoint before 'x_m,y_m' header");
    }
    std::size_t ca = 0, cb = 0;
    double xv, yv;
    try {
      xv = std::stod(a, &ca);
      yv = std::stod(b, &cb);
    } catch (const std::exception&) {
      throw std::runtime_error("track: line " + std::to_string(lineno) +
                               ": malformed number");
    }
    const bool a_clean = a.find_first_not_of(" \t\r", ca) == std::string::npos;
    const bool b_clean = b.find_first_not_of(" \t\r", cb) == std::string::npos;
    if (!a_clean || !b_clean) {
      throw std::runtime_error("track: line " + std::to_string(lineno) +
                               ": trailing junk after number");
    }
    xs.push_back(xv);
    ys.push_back(yv);
  }
  if (width <= 0.0) {
    throw std::runtime_error("track: missing or non-positive 'width' entry");
  }
  return Track(std::move(xs), std::move(ys), width);
}

Track make_stadium_track(double straight, double radius, double width,
                         int points_per_arc) {
  if (points_per_arc < 4) {
    throw std::invalid_argument("track: points_per_arc must be >= 4");
  }
  std::vector<double> xs, ys;
  // Bottom straight runs +x from (0,0) to (straight,0); arcs have centers
  // (straight, radius) and (0, radius * ... ), top straight returns in -x.
  const int k = points_per_arc;
  // Bottom straight (exclude the endpoint; the arc starts there).
  const int straight_pts = std::max(2, static_cast<int>(straight / radius) * k / 3);
  for (int i = 0; i < straight_pts; ++i) {
    const double t = static_cast<double>(i) / straight_pts;
    xs.push_back(t * straight);
    ys.push_back(0.0);
  }
  // Right arc: center (straight, radius), from angle -pi/2 to +pi/2.
  for (int i = 0; i <= k; ++i) {
    const double a = -kPi / 2 + kPi * static_cast<double>(i) / k;
    xs.push_back(straight + radius * std::cos(a));
    ys.push_back(radius + radius * std::sin(a));
  }
  // Top straight from (straight, 2r) back to (0, 2r).
  for (int i = 1; i < straight_pts; ++i) {
    const double t = static_cast<double>(i) / straight_pts;
    xs.push_back(straight - t * straight);
    ys.push_back(2.0 * radius);
  }
  // Left arc: center (0, radius), from +pi/2 to +3pi/2 (exclude endpoint,
  // which coincides with the first waypoint).
  for (int i = 0; i < k; ++i) {
    const double a = kPi / 2 + kPi * static_cast<double>(i) / k;
    xs.push_back(radius * std::cos(a));
    ys.push_back(radius + radius * std::sin(a));
  }
  return Track(std::move(xs), std::move(ys), width);
}

}  // namespace coat
