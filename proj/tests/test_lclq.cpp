#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "sppa/lclq.hpp"
#include "sppa/reference.hpp"
#include "sppa/rng.hpp"
#include "sppa/synth.hpp"

using namespace sppa;
using test_util::make_dataset;
using test_util::rel_close;

namespace {

PointDataset random_ds(std::int64_t n, int C, std::uint64_t seed) {
  BBox unit;
  unit.expand({0, 0});
  unit.expand({1, 1});
  auto recs = uniform_labeled_points(n, C, unit, seed);
  std::vector<std::string> names;
  for (int c = 0; c < C; ++c) names.push_back("c" + std::to_string(c));
  return PointDataset(std::move(recs), std::move(names));
}

LclqConfig exact_cfg(double h) {
  LclqConfig cfg;
  cfg.bandwidth = h;
  cfg.truncation = false;
  return cfg;
}

// The three-point line fixture: one A at the origin, two Bs above it.
PointDataset abb() { return make_dataset({{1, 0, 0, 0}, {2, 0, 1, 1}, {3, 0, 2, 1}}, 2); }

}  // namespace

TEST_CASE("distance weight values") {
  CHECK(lclq_weight(0.0, 1.0) == 1.0);
  CHECK(lclq_weight(1.0, 1.0) == doctest::Approx(0.6065307).epsilon(1e-6));
  CHECK(lclq_weight(5.0, 1.0) == doctest::Approx(3.727e-6).epsilon(1e-3));
  CHECK(lclq_weight(2.0, 2.0) == lclq_weight(1.0, 1.0));
  CHECK(lclq_weight(3.0, 1.0) < lclq_weight(2.0, 1.0));
}

TEST_CASE("neighbor fractions of the line fixture are exact") {
  const PointDataset ds = abb();
  const LclqConfig cfg = exact_cfg(0.7);
  CHECK(neighbor_fraction(ds, Anchor::point(1), 1, cfg) == 1.0);  // all neighbors are B
  CHECK(neighbor_fraction(ds, Anchor::point(1), 0, cfg) == 0.0);  // no neighbor is A
}

TEST_CASE("neighbor fractions match the double-loop oracle on random data") {
  const PointDataset ds = random_ds(50, 3, 64);
  const LclqConfig cfg = exact_cfg(0.11);
  for (std::uint32_t pos : ds.positions_by_id()) {
    const Anchor a = Anchor::point(ds.record(pos).id);
    for (int c = 0; c < 3; ++c)
      CHECK(rel_close(neighbor_fraction(ds, a, c, cfg), ref::neighbor_fraction(ds, a, c, 0.11),
                      1e-12));
  }
}

TEST_CASE("neighbor fractions sum to exactly one at every point anchor") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    for (int C : {2, 3, 6}) {
      const PointDataset ds = random_ds(120, C, seed * 1000 + C);
      // mixed bandwidths, including small ones that produce tiny fractions
      for (double h : {0.02, 0.1, 0.5}) {
        const LclqConfig cfg = exact_cfg(h);
        for (std::uint32_t pos : ds.positions_by_id()) {
          const NeighborFractions nf =
              neighbor_fractions(ds, Anchor::point(ds.record(pos).id), cfg);
          if (nf.isolated) continue;  // every weight underflowed; no partition
          double sum = 0.0;
          for (double f : nf.values) {
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            sum += f;
          }
          CHECK(sum == 1.0);
        }
      }
    }
  }
}

TEST_CASE("lclq of the line fixture follows the chance-share formula") {
  const PointDataset ds = abb();
  const LclqConfig cfg = exact_cfg(0.7);
  // N=3, N_B=2: fraction 1 / (2/2) = 1
  CHECK(lclq(ds, Anchor::point(1), 1, cfg) == 1.0);
  CHECK(lclq(ds, Anchor::point(1), 0, cfg) == 0.0);
}

TEST_CASE("single-category dataset of four points has lclq 3/4") {
  const PointDataset ds =
      make_dataset({{1, 0, 0, 0}, {2, 1, 0, 0}, {3, 0, 1, 0}, {4, 1, 1, 0}}, 1);
  const LclqConfig cfg = exact_cfg(1.0);
  for (std::int64_t id = 1; id <= 4; ++id) CHECK(lclq(ds, Anchor::point(id), 0, cfg) == 0.75);
}

TEST_CASE("lclq vector equals the per-category scalar calls") {
  const PointDataset ds = random_ds(80, 4, 5150);
  const LclqConfig cfg = exact_cfg(0.1);
  for (std::uint32_t pos : ds.positions_by_id()) {
    const Anchor a = Anchor::point(ds.record(pos).id);
    const LclqVector v = lclq_vector(ds, a, cfg);
    for (int c = 0; c < 4; ++c) CHECK(v.values[c] == lclq(ds, a, c, cfg));
  }
}

TEST_CASE("lclq matches the double-loop reference on random data") {
  const PointDataset ds = random_ds(200, 3, 8080);
  const LclqConfig cfg = exact_cfg(0.08);
  Rng rng(2);
  for (int q = 0; q < 40; ++q) {
    const std::int64_t id = static_cast<std::int64_t>(rng.below(200));
    for (int c = 0; c < 3; ++c)
      CHECK(rel_close(lclq(ds, Anchor::point(id), c, cfg),
                      ref::lclq(ds, Anchor::point(id), c, 0.08), 1e-12));
  }
  // free anchors too
  for (int q = 0; q < 20; ++q) {
    const Anchor a = Anchor::location({rng.uniform01(), rng.uniform01()});
    for (int c = 0; c < 3; ++c)
      CHECK(rel_close(lclq(ds, a, c, cfg), ref::lclq(ds, a, c, 0.08), 1e-12));
  }
}

TEST_CASE("an anchor beyond every cutoff is isolated: zero vector plus flag") {
  const PointDataset ds = make_dataset(
      {{1, 0, 0, 0}, {2, 0.1, 0, 0}, {3, 0, 0.1, 1}, {4, 100, 100, 1}}, 2);
  LclqConfig cfg;
  cfg.bandwidth = 0.05;  // cutoff radius 0.25
  const LclqVector v = lclq_vector(ds, Anchor::point(4), cfg);
  CHECK(v.isolated);
  for (double e : v.values) CHECK(e == 0.0);
  // and downstream treats it as chance-free: neighbor fractions all zero
  const NeighborFractions nf = neighbor_fractions(ds, Anchor::point(4), cfg);
  CHECK(nf.isolated);
}

TEST_CASE("truncated lclq is identical with and without the index") {
  const PointDataset ds = random_ds(250, 3, 11);
  LclqConfig cfg;
  cfg.bandwidth = 0.05;
  const SpatialIndex idx(ds, cfg.cutoff_radius());
  for (std::uint32_t pos : ds.positions_by_id()) {
    const Anchor a = Anchor::point(ds.record(pos).id);
    const LclqVector with = lclq_vector(ds, a, cfg, &idx);
    const LclqVector without = lclq_vector(ds, a, cfg, nullptr);
    CHECK(with.isolated == without.isolated);
    CHECK(with.values == without.values);
  }
}

TEST_CASE("free-coordinate anchors include every dataset point") {
  const PointDataset ds = abb();
  const LclqConfig cfg = exact_cfg(0.7);
  // at A's exact location, the free anchor also sees A itself
  const double frac_a = neighbor_fraction(ds, Anchor::location({0, 0}), 0, cfg);
  CHECK(frac_a > 0.0);
  const double frac_b = neighbor_fraction(ds, Anchor::location({0, 0}), 1, cfg);
  CHECK(frac_a + frac_b == 1.0);
}

TEST_CASE("global table: four identical single-category points average to 3/4") {
  const PointDataset ds =
      make_dataset({{1, 0, 0, 0}, {2, 1, 0, 0}, {3, 0, 1, 0}, {4, 1, 1, 0}}, 1);
  std::vector<std::pair<std::int64_t, Split>> entries;
  for (std::int64_t id = 1; id <= 4; ++id) entries.emplace_back(id, Split::train);
  const SplitAssignment split(std::move(entries), 0);
  const GlobalClqTable table = global_clq(ds, split, exact_cfg(1.0));
  REQUIRE(table.num_categories() == 1);
  CHECK(table.rows[0][0] == 0.75);
  CHECK(table.contributing[0] == 4);
}

TEST_CASE("global table row equals the shared vector when all anchors of a category agree") {
  // Symmetric square: two As on the left edge, two Bs on the right.
  const PointDataset ds =
      make_dataset({{1, 0, 0, 0}, {2, 0, 1, 0}, {3, 1, 0, 1}, {4, 1, 1, 1}}, 2);
  std::vector<std::pair<std::int64_t, Split>> entries;
  for (std::int64_t id = 1; id <= 4; ++id) entries.emplace_back(id, Split::train);
  const SplitAssignment split(std::move(entries), 0);
  const LclqConfig cfg = exact_cfg(0.9);
  const GlobalClqTable table = global_clq(ds, split, cfg);
  const LclqVector v1 = lclq_vector(ds, Anchor::point(1), cfg);
  const LclqVector v2 = lclq_vector(ds, Anchor::point(2), cfg);
  REQUIRE(v1.values == v2.values);  // symmetry
  for (int c = 0; c < 2; ++c) CHECK(table.rows[0][c] == v1.values[c]);
}

TEST_CASE("global table matches brute-force recomputation on random labels") {
  const PointDataset ds = random_ds(200, 3, 2718);
  std::vector<std::pair<std::int64_t, Split>> entries;
  for (std::uint32_t pos : ds.positions_by_id())
    entries.emplace_back(ds.record(pos).id, Split::train);
  const SplitAssignment split(std::move(entries), 0);
  const double h = 0.09;
  const GlobalClqTable table = global_clq(ds, split, exact_cfg(h));
  std::vector<std::int64_t> anchor_ids;
  for (std::uint32_t pos : ds.positions_by_id()) anchor_ids.push_back(ds.record(pos).id);
  const auto ref_rows = ref::global_clq_rows(ds, anchor_ids, h);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) CHECK(rel_close(table.rows[r][c], ref_rows[r][c], 1e-12));
}

TEST_CASE("global table requires training points in every category") {
  const PointDataset ds = make_dataset({{1, 0, 0, 0}, {2, 1, 0, 0}, {3, 0, 1, 1}}, 2);
  std::vector<std::pair<std::int64_t, Split>> entries{
      {1, Split::train}, {2, Split::train}, {3, Split::test}};
  const SplitAssignment split(std::move(entries), 0);
  CHECK_THROWS_AS(global_clq(ds, split, exact_cfg(1.0)), std::invalid_argument);
}

TEST_CASE("second-order probabilities: matching row wins outright when rows are orthogonal") {
  // Dataset with two well-separated single-category blobs; a location inside
  // the A blob has an LCLQ vector proportional to (x, 0), the global rows are
  // near-orthogonal, so the A row takes all the probability mass.
  const PointDataset ds = make_dataset(
      {{1, 0, 0, 0}, {2, 0.1, 0, 0}, {3, 10, 10, 1}, {4, 10.1, 10, 1}}, 2);
  LclqConfig cfg;
  cfg.bandwidth = 0.1;
  GlobalClqTable table;
  table.rows = {{2.0, 0.0}, {0.0, 2.0}};
  table.contributing = {2, 2};
  const ProbVector p = second_order_probs(ds, table, {0.05, 0.0}, cfg);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
}

TEST_CASE("second-order probabilities: isolated location falls back to uniform") {
  const PointDataset ds = make_dataset({{1, 0, 0, 0}, {2, 0.1, 0, 1}}, 2);
  LclqConfig cfg;
  cfg.bandwidth = 0.01;
  GlobalClqTable table;
  table.rows = {{1.0, 0.3}, {0.3, 1.0}};
  table.contributing = {1, 1};
  const ProbVector p = second_order_probs(ds, table, {50, 50}, cfg);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 0.5);
}

TEST_CASE("second-order probabilities: the 45-degree cosine fixture") {
  // V = (s, 0) against rows G_0 = (g, 0) and G_1 = (t, t):
  // similarities (1, 1/sqrt(2)), normalized to (2 - sqrt(2), sqrt(2) - 1).
  const PointDataset ds = make_dataset({{1, 0, 0, 0}, {2, 0.05, 0, 0}, {3, 9, 9, 1}}, 2);
  LclqConfig cfg;
  cfg.bandwidth = 0.05;
  GlobalClqTable table;
  table.rows = {{3.0, 0.0}, {1.5, 1.5}};
  table.contributing = {2, 1};
  const ProbVector p = second_order_probs(ds, table, {0.02, 0.0}, cfg);
  CHECK(p[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
  CHECK(p[0] == doctest::Approx(0.5858).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.4142).epsilon(1e-4));
}

TEST_CASE("scale invariance: scaling coordinates and bandwidth leaves lclq unchanged") {
  const PointDataset ds = random_ds(150, 3, 99);
  std::vector<std::tuple<std::int64_t, double, double, int>> rows;
  const double k = 1000.0;
  for (const PointRecord& r : ds.records()) rows.emplace_back(r.id, r.x * k, r.y * k, r.category);
  const PointDataset scaled = make_dataset(rows, 3);
  const LclqConfig cfg = exact_cfg(0.07);
  const LclqConfig cfg_scaled = exact_cfg(0.07 * k);
  for (std::uint32_t pos : ds.positions_by_id()) {
    const Anchor a = Anchor::point(ds.record(pos).id);
    const LclqVector v = lclq_vector(ds, a, cfg);
    const LclqVector w = lclq_vector(scaled, a, cfg_scaled);
    for (int c = 0; c < 3; ++c) CHECK(rel_close(w.values[c], v.values[c], 1e-12));
  }
}

TEST_CASE("second-order argmax is stable under positive scaling of rows") {
  const PointDataset ds = random_ds(120, 3, 424242);
  LclqConfig cfg;
  cfg.bandwidth = 0.08;
  std::vector<std::pair<std::int64_t, Split>> entries;
  for (std::uint32_t pos : ds.positions_by_id())
    entries.emplace_back(ds.record(pos).id, Split::train);
  const GlobalClqTable table = global_clq(ds, SplitAssignment(std::move(entries), 0), cfg);
  GlobalClqTable scaled = table;
  const double mult[3] = {7.0, 0.125, 3.0};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) scaled.rows[r][c] *= mult[r];

  Rng rng(77);
  for (int q = 0; q < 30; ++q) {
    const Vec2 x{rng.uniform01(), rng.uniform01()};
    const ProbVector a = second_order_probs(ds, table, x, cfg);
    const ProbVector b = second_order_probs(ds, scaled, x, cfg);
    CHECK(predict(a) == predict(b));
  }
}

TEST_CASE("range properties on random data") {
  const PointDataset ds = random_ds(150, 6, 500);
  const LclqConfig cfg = exact_cfg(0.06);
  Rng rng(3);
  for (int q = 0; q < 30; ++q) {
    const Anchor a = q % 2 ? Anchor::point(static_cast<std::int64_t>(rng.below(150)))
                           : Anchor::location({rng.uniform01(), rng.uniform01()});
    const NeighborFractions nf = neighbor_fractions(ds, a, cfg);
    for (double f : nf.values) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
    const LclqVector v = lclq_vector(ds, a, cfg);
    for (double e : v.values) CHECK(e >= 0.0);
  }
}

TEST_CASE("self-correction switch rescales only the anchor's own category") {
  const PointDataset ds = random_ds(60, 2, 8);
  LclqConfig plain = exact_cfg(0.1);
  LclqConfig corrected = plain;
  corrected.self_correction = true;
  const Anchor a = Anchor::point(5);
  const int own = ds.record(*ds.position_of(5)).category;
  const int other = 1 - own;
  const double n_own = static_cast<double>(ds.category_count(own));
  CHECK(lclq(ds, a, other, corrected) == lclq(ds, a, other, plain));
  CHECK(lclq(ds, a, own, corrected) ==
        doctest::Approx(lclq(ds, a, own, plain) * n_own / (n_own - 1.0)).epsilon(1e-12));
}

TEST_CASE("errors: unknown anchor id and tiny datasets") {
  const PointDataset ds = abb();
  const LclqConfig cfg = exact_cfg(1.0);
  CHECK_THROWS_AS(neighbor_fractions(ds, Anchor::point(99), cfg), std::invalid_argument);
  const PointDataset one = make_dataset({{1, 0, 0, 0}}, 1);
  CHECK_THROWS_AS(neighbor_fractions(one, Anchor::point(1), cfg), std::invalid_argument);
  // free anchors work on a single-point dataset
  CHECK(neighbor_fraction(one, Anchor::location({0, 0}), 0, cfg) == 1.0);
}
