#include "sppa/kde.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sppa/parallel.hpp"

namespace sppa {

namespace {
constexpr double kInvTwoPi = 1.0 / (2.0 * std::numbers::pi);
constexpr double kScoreFloor = 1e-300;
}  // namespace

void KdeConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("bandwidth must be positive and finite");
  if (truncation && !(cutoff_multiplier >= 3.0))
    throw std::invalid_argument("cutoff multiplier must be >= 3 when truncation is enabled");
}

void GridSpec::validate() const {
  if (!(cell > 0.0) || !std::isfinite(cell)) throw std::invalid_argument("grid cell must be > 0");
  if (width < 1 || height < 1) throw std::invalid_argument("grid must have at least one cell");
  if (!std::isfinite(x0) || !std::isfinite(y0)) throw std::invalid_argument("grid origin must be finite");
}

double gaussian_kernel(double u) {
  return std::exp(-0.5 * u * u) * kInvTwoPi;
}

double density_at(const PointDataset& ds, int category, Vec2 x, const KdeConfig& cfg,
                  const SpatialIndex* index) {
  cfg.validate();
  if (category < 0 || category >= ds.num_categories())
    throw std::invalid_argument("category index out of range");
  const std::int64_t n = ds.category_count(category);
  if (n < 1) throw std::invalid_argument("category has no points: " + ds.category_name(category));

  const double h = cfg.bandwidth;
  double acc = 0.0;
  if (cfg.truncation) {
    const double radius = cfg.cutoff_radius();
    const double r2 = radius * radius;
    if (index != nullptr) {
      for (std::uint32_t pos : index->query_positions(x, radius)) {
        const PointRecord& r = ds.record(pos);
        if (r.category != category) continue;
        acc += gaussian_kernel(std::sqrt(distance_sq(r.pos(), x)) / h);
      }
    } else {
      for (std::uint32_t pos : ds.positions_by_id()) {
        const PointRecord& r = ds.record(pos);
        if (r.category != category) continue;
        const double d2 = distance_sq(r.pos(), x);
        if (d2 > r2) continue;
        acc += gaussian_kernel(std::sqrt(d2) / h);
      }
    }
  } else {
    for (std::uint32_t pos : ds.positions_by_id()) {
      const PointRecord& r = ds.record(pos);
      if (r.category != category) continue;
      acc += gaussian_kernel(std::sqrt(distance_sq(r.pos(), x)) / h);
    }
  }
  return acc / (static_cast<double>(n) * h * h);
}

std::vector<double> class_scores_at(const PointDataset& ds, Vec2 x, const KdeConfig& cfg,
                                    const SpatialIndex* index) {
  if (ds.size() == 0) throw std::invalid_argument("empty dataset");
  std::vector<double> scores(ds.num_categories(), 0.0);
  for (int c = 0; c < ds.num_categories(); ++c) {
    const std::int64_t n = ds.category_count(c);
    if (n < 1) continue;
    scores[c] = static_cast<double>(n) * density_at(ds, c, x, cfg, index);
  }
  return scores;
}

ProbVector first_order_probs(const PointDataset& ds, Vec2 x, const KdeConfig& cfg,
                             const SpatialIndex* index) {
  std::vector<double> s = class_scores_at(ds, x, cfg, index);
  double total = 0.0;
  for (double v : s) total += v;
  if (total < kScoreFloor) return ProbVector::uniform(ds.num_categories());
  for (double& v : s) v /= total;
  return ProbVector(std::move(s));
}

Raster intensity_raster(const PointDataset& ds, int category, const GridSpec& grid,
                        const KdeConfig& cfg, const SpatialIndex* index) {
  grid.validate();
  Raster out;
  out.grid = grid;
  out.category = category;
  out.category_name = ds.category_name(category);
  out.values.assign(static_cast<std::size_t>(grid.width) * grid.height, 0.0);
  const int total = grid.width * grid.height;
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (int cell = 0; cell < total; ++cell) {
    const int ix = cell % grid.width;
    const int iy = cell / grid.width;
    out.values[cell] = density_at(ds, category, grid.center(ix, iy), cfg, index);
  }
  return out;
}

}  // namespace sppa
