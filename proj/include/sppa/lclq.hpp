#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sppa/dataset.hpp"
#include "sppa/geometry.hpp"
#include "sppa/prob.hpp"
#include "sppa/spatial_index.hpp"
#include "sppa/split.hpp"

namespace sppa {

struct LclqConfig {
  double bandwidth = 0.0;
  double cutoff_multiplier = 5.0;
  bool truncation = true;
  /// A weight total below this counts as "no neighborhood" (isolation).
  double weight_floor = 1e-12;
  /// Off by default: the denominator for the anchor's own category stays
  /// N_Y / (N - 1). When on, it becomes (N_Y - 1) / (N - 1).
  bool self_correction = false;

  void validate() const;
  double cutoff_radius() const { return cutoff_multiplier * bandwidth; }
};

/// Either one of the dataset's points (excluded from its own neighborhood)
/// or a free location (all points count as neighbors).
class Anchor {
 public:
  static Anchor point(std::int64_t id) {
    Anchor a;
    a.id_ = id;
    return a;
  }
  static Anchor location(Vec2 xy) {
    Anchor a;
    a.xy_ = xy;
    return a;
  }

  bool is_point() const { return id_.has_value(); }
  std::int64_t id() const { return *id_; }
  Vec2 free_pos() const { return xy_; }

 private:
  std::optional<std::int64_t> id_;
  Vec2 xy_{};
};

/// Gaussian distance weight w = exp(-0.5 * d^2 / h^2).
double lclq_weight(double d, double h);

struct NeighborFractions {
  std::vector<double> values;  // length C, each in [0, 1]
  bool isolated = false;       // weight total fell below the floor
};

/// Kernel-weighted fraction of each category among the anchor's neighbors.
/// The fractions partition the neighborhood: their plain left-to-right sum is
/// exactly 1.0 (see the normalization note in the implementation), or all
/// zero with the isolation flag set.
NeighborFractions neighbor_fractions(const PointDataset& ds, const Anchor& anchor,
                                     const LclqConfig& cfg, const SpatialIndex* index = nullptr);

double neighbor_fraction(const PointDataset& ds, const Anchor& anchor, int category,
                         const LclqConfig& cfg, const SpatialIndex* index = nullptr);

/// Local colocation quotient of the anchor toward `category`:
/// neighbor fraction divided by the chance share N_Y / (N - 1).
/// Values above 1 mean the categories co-occur more than expected.
double lclq(const PointDataset& ds, const Anchor& anchor, int category, const LclqConfig& cfg,
            const SpatialIndex* index = nullptr);

struct LclqVector {
  std::vector<double> values;  // length C
  Anchor anchor;
  bool isolated = false;
};

LclqVector lclq_vector(const PointDataset& ds, const Anchor& anchor, const LclqConfig& cfg,
                       const SpatialIndex* index = nullptr);

/// Batch evaluation over many anchors; anchors run in parallel, each result
/// identical to the scalar call.
std::vector<LclqVector> lclq_vectors(const PointDataset& ds, std::span<const Anchor> anchors,
                                     const LclqConfig& cfg, const SpatialIndex* index = nullptr);

/// Per-category mean LCLQ vectors over the training points.
struct GlobalClqTable {
  std::vector<std::vector<double>> rows;     // C rows of length C
  std::vector<std::int64_t> contributing;    // non-isolated anchors per row
  int num_categories() const { return static_cast<int>(rows.size()); }
};

/// Average the LCLQ vectors of training anchors per category. Both the
/// anchors and the neighbor universe are the training subset; isolated
/// anchors are excluded from the means.
GlobalClqTable global_clq(const PointDataset& ds, const SplitAssignment& split,
                          const LclqConfig& cfg);

/// Second-order locational probabilities at x: cosine similarity of the
/// location's LCLQ vector against every global row, clamped at zero and
/// normalized to sum 1; uniform when everything degenerates.
ProbVector second_order_probs(const PointDataset& ds, const GlobalClqTable& table, Vec2 x,
                              const LclqConfig& cfg, const SpatialIndex* index = nullptr);

}  // namespace sppa
