#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coat {

/// One axis of the search box: `count` evenly spaced values from lo to hi
/// inclusive. count == 1 degenerates to the single value lo.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int count = 2;
};

/// Finite axis-aligned grid of candidate parameter vectors. Points are
/// addressed by a row-major flat index: the last dimension varies fastest.
/// All geometric reasoning downstream happens on coordinates normalized
/// per-axis to [0, 1]; physical coordinates exist for I/O only.
class ParamGrid {
 public:
  explicit ParamGrid(std::vector<GridAxis> axes);

  int dims() const { return static_cast<int>(axes_.size()); }
  std::int64_t size() const { return size_; }
  const GridAxis& axis(int d) const { return axes_[d]; }

  /// Normalized step between adjacent points along dimension d
  /// (1 for a degenerate axis, so a single-value axis never contributes
  /// to distances).
  double spacing(int d) const { return spacing_[d]; }

  /// Flat-index stride of dimension d.
  std::int64_t stride(int d) const { return stride_[d]; }

  /// Normalized coordinate of grid line k along dimension d.
  double axis_coord(int d, int k) const {
    return axes_[d].count == 1 ? 0.0 : k * spacing_[d];
  }

  void index_to_multi(std::int64_t idx, int* out) const;
  std::int64_t multi_to_index(const int* multi) const;

  /// Normalized coordinates in [0,1]^dims.
  std::vector<double> index_to_coords(std::int64_t idx) const;
  void index_to_coords(std::int64_t idx, double* out) const;

  /// Physical coordinates (per-axis lo..hi).
  std::vector<double> physical_coords(std::int64_t idx) const;

  /// Flat index of the grid point closest to the physical point, per-axis
  /// rounding, ties toward the lower index.
  std::int64_t nearest_index(const std::vector<double>& physical) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<double> spacing_;
  std::vector<std::int64_t> stride_;
  std::int64_t size_ = 0;
};

/// Euclidean distance between grid points measured on normalized coordinates.
/// Precomputes the per-axis coordinate tables so repeated pairwise queries
/// stay cheap inside the set-expansion scans.
class Metric {
 public:
  explicit Metric(const ParamGrid& grid);

  const ParamGrid& grid() const { return *grid_; }
  double operator()(std::int64_t i, std::int64_t j) const;

  /// Coordinate table access for scan loops: normalized coordinate of grid
  /// line k along dimension d.
  double axis_coord(int d, int k) const { return coords_[d][k]; }

 private:
  const ParamGrid* grid_;
  std::vector<std::vector<double>> coords_;
};

inline double pairwise_distance(const Metric& m, std::int64_t i, std::int64_t j) {
  return m(i, j);
}

}  // namespace coat
