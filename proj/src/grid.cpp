#include "coat/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coat {

ParamGrid::ParamGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("grid: needs at least one axis");
  size_ = 1;
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const GridAxis& a = axes_[d];
    if (a.count < 1) throw std::invalid_argument("grid: axis count must be >= 1");
    if (a.count > 1 && !(a.hi > a.lo))
      throw std::invalid_argument("grid: axis needs hi > lo when count > 1");
    if (size_ > std::numeric_limits<std::int64_t>::max() / a.count)
      throw std::invalid_argument("grid: total point count overflows");
    size_ *= a.count;
    spacing_.push_back(a.count == 1 ? 1.0 : 1.0 / (a.count - 1));
  }
  stride_.assign(axes_.size(), 1);
  for (int d = static_cast<int>(axes_.size()) - 2; d >= 0; --d)
    stride_[d] = stride_[d + 1] * axes_[d + 1].count;
}

void ParamGrid::index_to_multi(std::int64_t idx, int* out) const {
  if (idx < 0 || idx >= size_) throw std::out_of_range("grid: flat index out of range");
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    out[d] = static_cast<int>(idx / stride_[d]);
    idx %= stride_[d];
  }
}

std::int64_t ParamGrid::multi_to_index(const int* multi) const {
  std::int64_t idx = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    if (multi[d] < 0 || multi[d] >= axes_[d].count)
      throw std::out_of_range("grid: multi index out of range");
    idx += stride_[d] * multi[d];
  }
  return idx;
}

std::vector<double> ParamGrid::index_to_coords(std::int64_t idx) const {
  std::vector<double> out(axes_.size());
  index_to_coords(idx, out.data());
  return out;
}

void ParamGrid::index_to_coords(std::int64_t idx, double* out) const {
  if (idx < 0 || idx >= size_) throw std::out_of_range("grid: flat index out of range");
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const int k = static_cast<int>(idx / stride_[d]);
    idx %= stride_[d];
    out[d] = axis_coord(static_cast<int>(d), k);
  }
}

std::vector<double> ParamGrid::physical_coords(std::int64_t idx) const {
  if (idx < 0 || idx >= size_) throw std::out_of_range("grid: flat index out of range");
  std::vector<double> out(axes_.size());
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const int k = static_cast<int>(idx / stride_[d]);
    idx %= stride_[d];
    const GridAxis& a = axes_[d];
    out[d] = a.count == 1 ? a.lo : a.lo + k * (a.hi - a.lo) / (a.count - 1);
  }
  return out;
}

std::int64_t ParamGrid::nearest_index(const std::vector<double>& physical) const {
  if (physical.size() != axes_.size())
    throw std::invalid_argument("grid: physical point has wrong dimension");
  std::int64_t idx = 0;
  for (std::size_t d = 0; d < axes_.size(); ++d) {
    const GridAxis& a = axes_[d];
    int k = 0;
    if (a.count > 1) {
      const double t = (physical[d] - a.lo) / (a.hi - a.lo) * (a.count - 1);
      // floor(t + 0.5) would round half up; half-integers go to the lower
      // index instead so ties are stable.
      k = static_cast<int>(std::ceil(t - 0.5));
      if (k < 0) k = 0;
      if (k >= a.count) k = a.count - 1;
    }
    idx += stride_[d] * k;
  }
  return idx;
}

Metric::Metric(const ParamGrid& grid) : grid_(&grid) {
  coords_.resize(grid.dims());
  for (int d = 0; d < grid.dims(); ++d) {
    coords_[d].resize(grid.axis(d).count);
    for (int k = 0; k < grid.axis(d).count; ++k) coords_[d][k] = grid.axis_coord(d, k);
  }
}

double Metric::operator()(std::int64_t i, std::int64_t j) const {
  int a[16];
  int b[16];
  const int nd = grid_->dims();
  if (nd > 16) throw std::invalid_argument("metric: more than 16 dimensions");
  grid_->index_to_multi(i, a);
  grid_->index_to_multi(j, b);
  double acc = 0.0;
  for (int d = 0; d < nd; ++d) {
    const double dx = coords_[d][a[d]] - coords_[d][b[d]];
    acc += dx * dx;
  }
  return std::sqrt(acc);
}

}  // namespace coat
