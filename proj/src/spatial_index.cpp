#include "sppa/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sppa {

SpatialIndex::SpatialIndex(const PointDataset& ds, double cell_size) : ds_(&ds), cell_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw std::invalid_argument("cell size must be positive and finite");
  const BBox& b = ds.bounds();
  if (ds.size() > 0) {
    x0_ = b.min_x;
    y0_ = b.min_y;
    nx_ = std::max(1, static_cast<int>(std::ceil(b.width() / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil(b.height() / cell_)));
  }
  cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  // Insert in ascending-id order so each cell list is id-sorted.
  for (std::uint32_t pos : ds.positions_by_id()) {
    const PointRecord& r = ds.record(pos);
    cells_[cell_of(r.x, r.y)].push_back(pos);
  }
}

std::size_t SpatialIndex::cell_of(double x, double y) const {
  int cx = static_cast<int>(std::floor((x - x0_) / cell_));
  int cy = static_cast<int>(std::floor((y - y0_) / cell_));
  cx = std::clamp(cx, 0, nx_ - 1);
  cy = std::clamp(cy, 0, ny_ - 1);
  return static_cast<std::size_t>(cy) * nx_ + cx;
}

std::vector<std::uint32_t> SpatialIndex::query_positions(Vec2 center, double r) const {
  if (!(r >= 0.0)) throw std::invalid_argument("query radius must be >= 0");
  std::vector<std::uint32_t> out;
  if (ds_->size() == 0) return out;
  // Clamp the search window before converting to cell indices so infinite or
  // far-outside queries stay well-defined.
  const double gx1 = x0_ + static_cast<double>(nx_) * cell_;
  const double gy1 = y0_ + static_cast<double>(ny_) * cell_;
  const double lo_x = std::clamp(center.x - r, x0_, gx1);
  const double hi_x = std::clamp(center.x + r, x0_, gx1);
  const double lo_y = std::clamp(center.y - r, y0_, gy1);
  const double hi_y = std::clamp(center.y + r, y0_, gy1);
  const int cx0 = std::clamp(static_cast<int>(std::floor((lo_x - x0_) / cell_)), 0, nx_ - 1);
  const int cx1 = std::clamp(static_cast<int>(std::floor((hi_x - x0_) / cell_)), 0, nx_ - 1);
  const int cy0 = std::clamp(static_cast<int>(std::floor((lo_y - y0_) / cell_)), 0, ny_ - 1);
  const int cy1 = std::clamp(static_cast<int>(std::floor((hi_y - y0_) / cell_)), 0, ny_ - 1);
  const double r2 = r * r;
  for (int cy = cy0; cy <= cy1; ++cy) {
    for (int cx = cx0; cx <= cx1; ++cx) {
      for (std::uint32_t pos : cells_[static_cast<std::size_t>(cy) * nx_ + cx]) {
        if (distance_sq(ds_->record(pos).pos(), center) <= r2) out.push_back(pos);
      }
    }
  }
  std::sort(out.begin(), out.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ds_->record(a).id < ds_->record(b).id;
  });
  return out;
}

std::vector<std::int64_t> SpatialIndex::query_radius(Vec2 center, double r) const {
  std::vector<std::int64_t> ids;
  for (std::uint32_t pos : query_positions(center, r)) ids.push_back(ds_->record(pos).id);
  return ids;
}

}  // namespace sppa
