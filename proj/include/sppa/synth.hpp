#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/geometry.hpp"
#include "sppa/prob.hpp"
#include "sppa/rng.hpp"

namespace sppa {

/// Seeded point-process generator settings for one category.
struct ProcessSpec {
  enum class Variant { homogeneous_poisson, thomas_cluster };

  Variant variant = Variant::homogeneous_poisson;
  BBox region;
  double intensity = 0.0;         // homogeneous_poisson: points per unit area
  double parent_intensity = 0.0;  // thomas_cluster: parents per unit area
  double mean_offspring = 0.0;    // thomas_cluster: Poisson mean per parent
  double offspring_sigma = 0.0;   // thomas_cluster: isotropic Gaussian spread
  int category = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Draw one realization. Poisson: count ~ Poisson(intensity * area), points
/// i.i.d. uniform. Thomas: Poisson parents, Poisson(mean) offspring each with
/// Gaussian displacement, kept inside the region by redrawing the
/// displacement. Ids are assigned sequentially from `first_id`.
std::vector<PointRecord> gen_points(const ProcessSpec& spec, std::int64_t first_id = 0);

/// Exactly n uniform points with independent uniform labels over C
/// categories; the complete-spatial-randomness fixture.
std::vector<PointRecord> uniform_labeled_points(std::int64_t n, int num_categories,
                                                const BBox& region, std::uint64_t seed,
                                                std::int64_t first_id = 0);

/// Synthetic stand-in for an external image classifier.
struct OracleSpec {
  double accuracy = 0.0;       // chance the emitted label is the true one
  double concentration = 0.0;  // probability mass placed on the emitted label
  std::uint64_t seed = 0;

  void validate(int num_categories) const;  // needs concentration > 1/C
};

/// Per-id probability vectors whose argmax equals the emitted label; expected
/// top-1 accuracy equals spec.accuracy. Truth pairs are consumed in the
/// order given (callers pass ascending id for reproducible streams).
ProbTable noisy_visual_table(const std::vector<std::pair<std::int64_t, int>>& truth,
                             int num_categories, const OracleSpec& spec);

}  // namespace sppa
