#pragma once

#include <cstdint>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/geometry.hpp"

namespace sppa {

/// Uniform-grid fixed-radius index over a dataset's bounding box.
///
/// A radius query returns exactly the points within Euclidean distance <= r
/// of the query location (boundary inclusive, tested as squared distance),
/// sorted by ascending id so downstream reductions are order-stable.
/// The index borrows the dataset; the dataset must outlive it.
class SpatialIndex {
 public:
  SpatialIndex(const PointDataset& ds, double cell_size);

  std::vector<std::int64_t> query_radius(Vec2 center, double r) const;

  /// Same query, returning record positions instead of ids (still ordered by
  /// ascending id); the cheap path for kernel sums.
  std::vector<std::uint32_t> query_positions(Vec2 center, double r) const;

  double cell_size() const { return cell_; }
  int cells_x() const { return nx_; }
  int cells_y() const { return ny_; }
  const PointDataset& dataset() const { return *ds_; }

 private:
  std::size_t cell_of(double x, double y) const;

  const PointDataset* ds_;
  double cell_;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;  // positions, ascending id per cell
};

}  // namespace sppa
