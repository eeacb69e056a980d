#pragma once

#include <string>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/geometry.hpp"
#include "sppa/prob.hpp"
#include "sppa/spatial_index.hpp"

namespace sppa {

/// Kernel density settings. The kernel itself is fixed to the radially
/// symmetric 2-D Gaussian; truncation drops contributions beyond
/// cutoff_multiplier * bandwidth so a spatial index can skip far points.
struct KdeConfig {
  double bandwidth = 0.0;
  double cutoff_multiplier = 5.0;
  bool truncation = true;

  void validate() const;
  double cutoff_radius() const { return cutoff_multiplier * bandwidth; }
};

struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double cell = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  /// Center of cell (ix, iy); row iy = 0 sits at minimum y.
  Vec2 center(int ix, int iy) const {
    return {x0 + (ix + 0.5) * cell, y0 + (iy + 0.5) * cell};
  }
};

/// Gridded per-category density surface, row-major with row 0 at minimum y.
struct Raster {
  GridSpec grid;
  std::vector<double> values;
  int category = 0;
  std::string category_name;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * grid.width + ix]; }
};

/// Radial 2-D Gaussian kernel, u = distance/bandwidth: exp(-u^2/2) / (2*pi).
/// Integrates to 1 over the plane as K(|x|/h)/h^2.
double gaussian_kernel(double u);

/// Kernel density of one category at x: (1 / (n_c h^2)) * sum K(|x - x_i| / h)
/// over that category's points. Summation runs in ascending-id order, and the
/// truncated value is identical with and without an index.
///
/// Truncation drops at most K(cutoff_multiplier) / h^2 per omitted point
/// divided by n_c, so the relative error is bounded by
/// K(cutoff_multiplier) / (h^2 * density); at the default cutoff of 5
/// bandwidths that is ~3.7e-6 of the kernel peak. No boundary correction is
/// applied, so estimates within a few bandwidths of the bounding box edge are
/// biased low. A bandwidth around 0.05 x the bbox diagonal is a reasonable
/// starting point when nothing better is known.
double density_at(const PointDataset& ds, int category, Vec2 x, const KdeConfig& cfg,
                  const SpatialIndex* index = nullptr);

/// Count-weighted class scores S_c = n_c * density_at(c); prevalence-aware
/// evidence for each category. Categories without points score 0.
std::vector<double> class_scores_at(const PointDataset& ds, Vec2 x, const KdeConfig& cfg,
                                    const SpatialIndex* index = nullptr);

/// Class scores normalized to a distribution. Falls back to uniform when the
/// total score underflows (e.g. far outside the data under truncation).
ProbVector first_order_probs(const PointDataset& ds, Vec2 x, const KdeConfig& cfg,
                             const SpatialIndex* index = nullptr);

/// density_at sampled at every cell center, cells evaluated in parallel.
Raster intensity_raster(const PointDataset& ds, int category, const GridSpec& grid,
                        const KdeConfig& cfg, const SpatialIndex* index = nullptr);

}  // namespace sppa
