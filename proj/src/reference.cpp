#include "sppa/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sppa::ref {

std::vector<std::int64_t> radius_query(const PointDataset& ds, Vec2 center, double r) {
  std::vector<std::int64_t> out;
  const double r2 = r * r;
  for (const PointRecord& rec : ds.records())
    if (distance_sq(rec.pos(), center) <= r2) out.push_back(rec.id);
  std::sort(out.begin(), out.end());
  return out;
}

double density_at(const PointDataset& ds, int category, Vec2 x, double bandwidth) {
  const double h = bandwidth;
  double sum = 0.0;
  std::int64_t n = 0;
  for (const PointRecord& rec : ds.records()) {
    if (rec.category != category) continue;
    ++n;
    const double d = std::sqrt(distance_sq(rec.pos(), x));
    sum += std::exp(-0.5 * (d / h) * (d / h)) / (2.0 * std::numbers::pi);
  }
  if (n == 0) throw std::invalid_argument("category has no points");
  return sum / (static_cast<double>(n) * h * h);
}

std::vector<double> class_scores_at(const PointDataset& ds, Vec2 x, double bandwidth) {
  std::vector<double> out(ds.num_categories(), 0.0);
  for (int c = 0; c < ds.num_categories(); ++c)
    if (ds.category_count(c) > 0)
      out[c] = static_cast<double>(ds.category_count(c)) * density_at(ds, c, x, bandwidth);
  return out;
}

Raster intensity_raster(const PointDataset& ds, int category, const GridSpec& grid,
                        double bandwidth) {
  Raster out;
  out.grid = grid;
  out.category = category;
  out.category_name = ds.category_name(category);
  out.values.assign(static_cast<std::size_t>(grid.width) * grid.height, 0.0);
  for (int iy = 0; iy < grid.height; ++iy)
    for (int ix = 0; ix < grid.width; ++ix)
      out.values[static_cast<std::size_t>(iy) * grid.width + ix] =
          density_at(ds, category, grid.center(ix, iy), bandwidth);
  return out;
}

namespace {

Vec2 anchor_pos(const PointDataset& ds, const Anchor& a) {
  if (!a.is_point()) return a.free_pos();
  const auto pos = ds.position_of(a.id());
  if (!pos) throw std::invalid_argument("unknown anchor id");
  return ds.record(*pos).pos();
}

}  // namespace

double neighbor_fraction(const PointDataset& ds, const Anchor& anchor, int category,
                         double bandwidth) {
  const Vec2 x = anchor_pos(ds, anchor);
  double num = 0.0, den = 0.0;
  for (const PointRecord& rec : ds.records()) {
    if (anchor.is_point() && rec.id == anchor.id()) continue;
    const double d2 = distance_sq(rec.pos(), x);
    const double w = std::exp(-0.5 * d2 / (bandwidth * bandwidth));
    den += w;
    if (rec.category == category) num += w;
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

double lclq(const PointDataset& ds, const Anchor& anchor, int category, double bandwidth) {
  const double frac = neighbor_fraction(ds, anchor, category, bandwidth);
  const double chance = static_cast<double>(ds.category_count(category)) /
                        static_cast<double>(ds.size() - 1);
  return frac / chance;
}

std::vector<double> lclq_vector(const PointDataset& ds, const Anchor& anchor, double bandwidth) {
  std::vector<double> out(ds.num_categories(), 0.0);
  for (int c = 0; c < ds.num_categories(); ++c) out[c] = lclq(ds, anchor, c, bandwidth);
  return out;
}

std::vector<std::vector<double>> global_clq_rows(const PointDataset& ds,
                                                 const std::vector<std::int64_t>& anchor_ids,
                                                 double bandwidth) {
  const int C = ds.num_categories();
  std::vector<std::vector<double>> rows(C, std::vector<double>(C, 0.0));
  std::vector<std::int64_t> counts(C, 0);
  for (std::int64_t id : anchor_ids) {
    const auto pos = ds.position_of(id);
    if (!pos) throw std::invalid_argument("unknown anchor id");
    const int cat = ds.record(*pos).category;
    const std::vector<double> v = lclq_vector(ds, Anchor::point(id), bandwidth);
    for (int c = 0; c < C; ++c) rows[cat][c] += v[c];
    ++counts[cat];
  }
  for (int cat = 0; cat < C; ++cat)
    if (counts[cat] > 0)
      for (int c = 0; c < C; ++c) rows[cat][c] /= static_cast<double>(counts[cat]);
  return rows;
}

}  // namespace sppa::ref
