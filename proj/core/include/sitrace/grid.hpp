#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sitrace/common.hpp"

namespace sitrace {

/// Tensor grid of sample points. Points are stored flat, enumerated with the
/// first axis varying fastest. Every maker uses the half-step offset
/// xi_m = lo + (m + 1/2) h, so breakpoints of indicator spectra and dyadic
/// discontinuity sets are never sampled.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, std::size_t per_axis, double lo, double hi);

  /// Grid from an explicit flat point list (dim-major), e.g. a single point.
  static Grid from_points(int dim, std::vector<double> flat) {
    Grid g;
    g.dim_ = dim;
    g.count_ = flat.size() / static_cast<std::size_t>(dim);
    g.per_axis_ = g.count_;
    g.cell_volume_ = 0.0;
    g.flat_ = std::move(flat);
    return g;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return count_; }
  std::size_t per_axis() const { return per_axis_; }
  double cell_volume() const { return cell_volume_; }

  std::span<const double> point(std::size_t i) const {
    return {flat_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }

 private:
  int dim_ = 0;
  std::size_t per_axis_ = 0;
  std::size_t count_ = 0;
  double cell_volume_ = 0.0;
  std::vector<double> flat_;
};

inline Grid::Grid(int dim, std::size_t per_axis, double lo, double hi) : dim_(dim), per_axis_(per_axis) {
  if (dim < 1 || per_axis < 1) throw std::invalid_argument("grid: dim and size must be positive");
  const double h = (hi - lo) / static_cast<double>(per_axis);
  count_ = 1;
  for (int d = 0; d < dim; ++d) count_ *= per_axis;
  cell_volume_ = 1.0;
  for (int d = 0; d < dim; ++d) cell_volume_ *= h;
  flat_.resize(count_ * static_cast<std::size_t>(dim));
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  for (std::size_t i = 0; i < count_; ++i) {
    for (int d = 0; d < dim; ++d)
      flat_[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] =
          lo + (static_cast<double>(idx[static_cast<std::size_t>(d)]) + 0.5) * h;
    for (int d = 0; d < dim; ++d) {
      if (++idx[static_cast<std::size_t>(d)] < per_axis) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
  }
}

/// Offset grid over the fundamental cell [-pi, pi)^n.
inline Grid fundamental_grid(int dim, std::size_t per_axis) {
  return Grid(dim, per_axis, -pi, pi);
}

/// Offset grid over [lo, hi)^n, for profiles sampled beyond one period.
inline Grid box_grid(int dim, std::size_t per_axis, double lo, double hi) {
  return Grid(dim, per_axis, lo, hi);
}

}  // namespace sitrace
