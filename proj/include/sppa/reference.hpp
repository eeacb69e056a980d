#pragma once

#include <cstdint>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/geometry.hpp"
#include "sppa/kde.hpp"
#include "sppa/lclq.hpp"

// Serial brute-force implementations used as test oracles and as the
// benchmark baseline. They share the accelerated kernels' data types but
// none of their code: plain double loops over the records in file order,
// no spatial index, no truncation.
namespace sppa::ref {

std::vector<std::int64_t> radius_query(const PointDataset& ds, Vec2 center, double r);

double density_at(const PointDataset& ds, int category, Vec2 x, double bandwidth);

std::vector<double> class_scores_at(const PointDataset& ds, Vec2 x, double bandwidth);

Raster intensity_raster(const PointDataset& ds, int category, const GridSpec& grid,
                        double bandwidth);

/// Weighted share of category-Y neighbors around the anchor (anchor excluded
/// when it is a dataset point). Returns 0 for an empty neighborhood.
double neighbor_fraction(const PointDataset& ds, const Anchor& anchor, int category,
                         double bandwidth);

double lclq(const PointDataset& ds, const Anchor& anchor, int category, double bandwidth);

std::vector<double> lclq_vector(const PointDataset& ds, const Anchor& anchor, double bandwidth);

/// Per-category means of lclq_vector over the given anchor ids.
std::vector<std::vector<double>> global_clq_rows(const PointDataset& ds,
                                                 const std::vector<std::int64_t>& anchor_ids,
                                                 double bandwidth);

}  // namespace sppa::ref
