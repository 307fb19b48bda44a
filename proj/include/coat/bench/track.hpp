#pragma once

// Closed-loop track geometry for the toy lap simulator.  A track is a closed
// polyline of centerline waypoints plus a constant total width.  All queries
// are phrased in arc length along the centerline; arc length wraps modulo the
// lap length for position/heading lookups while the simulator itself keeps an
// unwrapped (monotone) progress coordinate.

#include <cstddef>
#include <string>
#include <vector>

namespace coat {

/// Result of projecting a point onto the centerline: the arc length of the
/// closest centerline point and the signed lateral offset (positive to the
/// left of the direction of travel).
struct TrackProjection {
  double arc = 0.0;
  double lateral = 0.0;
  double distance = 0.0;
};

class Track {
 public:
  /// Builds a closed track from centerline waypoints.  If the last waypoint
  /// repeats the first it is dropped; the closing segment is implicit.
  /// Requires at least 3 distinct waypoints and a positive width.
  Track(std::vector<double> xs, std::vector<double> ys, double width);

  double width() const { return width_; }
  double lap_length() const { return total_len_; }
  std::size_t segment_count() const { return xs_.size(); }

  /// Centerline position at arc length s (s wraps modulo the lap length).
  void position(double s, double* x, double* y) const;

  /// Centerline heading (radians) at arc length s.  Piecewise constant per
  /// segment.
  double heading(double s) const;

  /// Projects (x, y) onto the centerline, searching only segments whose arc
  /// range overlaps [hint - back, hint + forward].  The returned arc is
  /// reported relative to the hint's winding, i.e. it is the unwrapped arc
  /// closest to the hint, so callers can keep a monotone progress coordinate.
  TrackProjection project(double x, double y, double hint, double back,
                          double forward) const;

 private:
  double wrap(double s) const;
  std::size_t segment_at(double s) const;

  std::vector<double> xs_, ys_;        // waypoints
  std::vector<double> seg_len_;        // length of segment i -> i+1 (mod n)
  std::vector<double> cum_len_;        // arc length at waypoint i (cum_len_[0] = 0)
  std::vector<double> heading_;        // heading of segment i
  double total_len_ = 0.0;
  double width_ = 0.0;
};

/// Loads a track from a CSV file with the layout:
///
///   # comment lines start with '#'
///   width,0.46
///   x_m,y_m
///   0.0,0.0
///   ...
///
/// Throws std::runtime_error with the offending line number on malformed
/// input.
Track load_track_csv(const std::string& path);

/// Builds the bundled stadium-shaped test track procedurally: two straights
/// joined by semicircular ends.  Used by tests so they do not depend on data
/// files; the shipped tracks/oval.csv encodes the same shape.
Track make_stadium_track(double straight, double radius, double width,
                         int points_per_arc);

}  // namespace coat
