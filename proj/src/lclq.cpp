#include "sppa/lclq.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sppa/parallel.hpp"

namespace sppa {

void LclqConfig::validate() const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("bandwidth must be positive and finite");
  if (truncation && !(cutoff_multiplier >= 3.0))
    throw std::invalid_argument("cutoff multiplier must be >= 3 when truncation is enabled");
  if (!(weight_floor > 0.0)) throw std::invalid_argument("weight floor must be > 0");
}

double lclq_weight(double d, double h) {
  return std::exp(-0.5 * (d * d) / (h * h));
}

namespace {

// --- exact partition normalization ------------------------------------------
//
// The per-category weight sums num[c] partition the weight total, so the
// fractions num[c]/den must sum to 1. Plain division leaves the left-to-right
// float sum off by an ulp or two roughly a fifth of the time. The layers below
// nudge the result so the sum is exactly 1.0 while every fraction moves by at
// most ~1e-13 relative: first a walk on single large entries (trying the last
// nonzero entry first, where a hit is guaranteed if it is large), then a
// retry with the denominator itself shifted by a few ulps, then paired
// adjustments. Zero entries are never touched.

double l2r_sum(const double* f, int n) {
  double s = 0.0;
  for (int c = 0; c < n; ++c) s += f[c];
  return s;
}

bool walk_site(double* f, int n, int k, int steps) {
  double s = l2r_sum(f, n);
  f[k] += 1.0 - s;
  for (int i = 0; i < steps; ++i) {
    s = l2r_sum(f, n);
    if (s == 1.0) return true;
    f[k] = std::nextafter(f[k], s < 1.0 ? 2.0 : -1.0);
  }
  return false;
}

constexpr double kLargeEntry = 0x1p-8;

void exact_partition(const std::vector<double>& num, double den, std::vector<double>& f) {
  const int n = static_cast<int>(num.size());
  auto fill = [&](double d) {
    for (int c = 0; c < n; ++c) f[c] = num[c] == 0.0 ? 0.0 : num[c] / d;
  };
  fill(den);
  if (l2r_sum(f.data(), n) == 1.0) return;

  std::vector<double> raw = f;
  auto restore = [&] { f = raw; };

  int last_nz = -1;
  for (int c = 0; c < n; ++c)
    if (f[c] != 0.0) last_nz = c;
  if (last_nz >= 0 && f[last_nz] >= kLargeEntry && walk_site(f.data(), n, last_nz, 64)) return;
  restore();

  std::vector<int> sites;
  for (int c = 0; c < n; ++c)
    if (f[c] >= kLargeEntry) sites.push_back(c);
  std::sort(sites.begin(), sites.end(), [&](int a, int b) {
    return f[a] > f[b] || (f[a] == f[b] && a < b);
  });
  for (int k : sites) {
    if (walk_site(f.data(), n, k, 64)) return;
    restore();
  }

  int kmax = 0;
  for (int c = 1; c < n; ++c)
    if (f[c] > f[kmax]) kmax = c;
  for (int steps = 1; steps <= 8; ++steps) {
    for (int sgn : {1, -1}) {
      double d = den;
      for (int i = 0; i < steps; ++i) d = std::nextafter(d, sgn > 0 ? 4.0 * den : 0.0);
      fill(d);
      if (l2r_sum(f.data(), n) == 1.0) return;
      if (walk_site(f.data(), n, kmax, 48)) return;
    }
  }
  restore();

  for (int k1 : sites) {
    for (int c = 0; c < n; ++c) {
      if (c == k1 || f[c] < 0x1p-10) continue;
      for (int q : {1, -1, 2, -2}) {
        restore();
        f[c] = raw[c] + q * 0x1p-53;
        if (f[c] <= 0.0) continue;
        if (l2r_sum(f.data(), n) == 1.0 || walk_site(f.data(), n, k1, 48)) return;
      }
    }
  }
  restore();  // no exact hit; keep the faithful quotients
}

struct WeightSums {
  std::vector<double> num;
  double den = 0.0;
};

WeightSums weight_sums(const PointDataset& ds, const Anchor& anchor, const LclqConfig& cfg,
                       const SpatialIndex* index) {
  cfg.validate();
  Vec2 x;
  std::int64_t skip_id = -1;
  bool has_skip = false;
  if (anchor.is_point()) {
    const auto pos = ds.position_of(anchor.id());
    if (!pos) throw std::invalid_argument("unknown anchor id: " + std::to_string(anchor.id()));
    if (ds.size() < 2) throw std::invalid_argument("point anchors need a dataset of >= 2 points");
    x = ds.record(*pos).pos();
    skip_id = anchor.id();
    has_skip = true;
  } else {
    if (ds.size() == 0) throw std::invalid_argument("empty dataset");
    x = anchor.free_pos();
  }

  const double h = cfg.bandwidth;
  WeightSums out;
  out.num.assign(ds.num_categories(), 0.0);
  auto accumulate = [&](const PointRecord& r, double d2) {
    out.num[r.category] += lclq_weight(std::sqrt(d2), h);
  };
  if (cfg.truncation) {
    const double radius = cfg.cutoff_radius();
    const double r2 = radius * radius;
    if (index != nullptr) {
      for (std::uint32_t pos : index->query_positions(x, radius)) {
        const PointRecord& r = ds.record(pos);
        if (has_skip && r.id == skip_id) continue;
        accumulate(r, distance_sq(r.pos(), x));
      }
    } else {
      for (std::uint32_t pos : ds.positions_by_id()) {
        const PointRecord& r = ds.record(pos);
        if (has_skip && r.id == skip_id) continue;
        const double d2 = distance_sq(r.pos(), x);
        if (d2 > r2) continue;
        accumulate(r, d2);
      }
    }
  } else {
    for (std::uint32_t pos : ds.positions_by_id()) {
      const PointRecord& r = ds.record(pos);
      if (has_skip && r.id == skip_id) continue;
      accumulate(r, distance_sq(r.pos(), x));
    }
  }
  for (double v : out.num) out.den += v;
  return out;
}

// Chance-share denominator count for one category; nullopt when the
// self-corrected count hits zero (lone member of its own category).
std::int64_t chance_count(const PointDataset& ds, const Anchor& anchor, int category,
                          const LclqConfig& cfg) {
  std::int64_t n_y = ds.category_count(category);
  if (cfg.self_correction && anchor.is_point()) {
    const auto pos = ds.position_of(anchor.id());
    if (pos && ds.record(*pos).category == category) --n_y;
  }
  return n_y;
}

}  // namespace

NeighborFractions neighbor_fractions(const PointDataset& ds, const Anchor& anchor,
                                     const LclqConfig& cfg, const SpatialIndex* index) {
  const WeightSums sums = weight_sums(ds, anchor, cfg, index);
  NeighborFractions out;
  out.values.assign(ds.num_categories(), 0.0);
  if (sums.den < cfg.weight_floor) {
    out.isolated = true;
    return out;
  }
  exact_partition(sums.num, sums.den, out.values);
  return out;
}

double neighbor_fraction(const PointDataset& ds, const Anchor& anchor, int category,
                         const LclqConfig& cfg, const SpatialIndex* index) {
  if (category < 0 || category >= ds.num_categories())
    throw std::invalid_argument("category index out of range");
  return neighbor_fractions(ds, anchor, cfg, index).values[category];
}

double lclq(const PointDataset& ds, const Anchor& anchor, int category, const LclqConfig& cfg,
            const SpatialIndex* index) {
  if (category < 0 || category >= ds.num_categories())
    throw std::invalid_argument("category index out of range");
  if (ds.category_count(category) < 1)
    throw std::invalid_argument("category has no points: " + ds.category_name(category));
  const NeighborFractions nf = neighbor_fractions(ds, anchor, cfg, index);
  if (nf.isolated) return 0.0;
  const std::int64_t n_y = chance_count(ds, anchor, category, cfg);
  if (n_y < 1) return 0.0;
  const double scale = static_cast<double>(ds.size() - 1) / static_cast<double>(n_y);
  return nf.values[category] * scale;
}

LclqVector lclq_vector(const PointDataset& ds, const Anchor& anchor, const LclqConfig& cfg,
                       const SpatialIndex* index) {
  for (int c = 0; c < ds.num_categories(); ++c)
    if (ds.category_count(c) < 1)
      throw std::invalid_argument("category has no points: " + ds.category_name(c));
  LclqVector out{std::vector<double>(ds.num_categories(), 0.0), anchor, false};
  const NeighborFractions nf = neighbor_fractions(ds, anchor, cfg, index);
  if (nf.isolated) {
    out.isolated = true;
    return out;
  }
  for (int c = 0; c < ds.num_categories(); ++c) {
    const std::int64_t n_y = chance_count(ds, anchor, c, cfg);
    if (n_y < 1) continue;
    const double scale = static_cast<double>(ds.size() - 1) / static_cast<double>(n_y);
    out.values[c] = nf.values[c] * scale;
  }
  return out;
}

std::vector<LclqVector> lclq_vectors(const PointDataset& ds, std::span<const Anchor> anchors,
                                     const LclqConfig& cfg, const SpatialIndex* index) {
  std::vector<LclqVector> out(anchors.size());
  const std::int64_t n = static_cast<std::int64_t>(anchors.size());
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (std::int64_t i = 0; i < n; ++i) out[i] = lclq_vector(ds, anchors[i], cfg, index);
  return out;
}

GlobalClqTable global_clq(const PointDataset& ds, const SplitAssignment& split,
                          const LclqConfig& cfg) {
  cfg.validate();
  const std::vector<std::int64_t> train_ids = split.ids(Split::train);
  if (train_ids.size() < 2) throw std::invalid_argument("need at least two training points");
  const PointDataset train = ds.subset(train_ids);
  for (int c = 0; c < train.num_categories(); ++c)
    if (train.category_count(c) < 1)
      throw std::invalid_argument("category has no training points: " + train.category_name(c));

  std::optional<SpatialIndex> index;
  if (cfg.truncation) index.emplace(train, cfg.cutoff_radius());

  std::vector<Anchor> anchors;
  anchors.reserve(train_ids.size());
  for (std::int64_t id : train_ids) anchors.push_back(Anchor::point(id));
  const std::vector<LclqVector> vectors =
      lclq_vectors(train, anchors, cfg, index ? &*index : nullptr);

  const int C = train.num_categories();
  GlobalClqTable table;
  table.rows.assign(C, std::vector<double>(C, 0.0));
  table.contributing.assign(C, 0);
  // Serial accumulation in ascending anchor id order keeps the means
  // bit-identical across thread counts.
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (vectors[i].isolated) continue;
    const int cat = train.record(*train.position_of(train_ids[i])).category;
    for (int c = 0; c < C; ++c) table.rows[cat][c] += vectors[i].values[c];
    ++table.contributing[cat];
  }
  for (int cat = 0; cat < C; ++cat) {
    if (table.contributing[cat] == 0) continue;
    for (int c = 0; c < C; ++c) table.rows[cat][c] /= static_cast<double>(table.contributing[cat]);
  }
  return table;
}

ProbVector second_order_probs(const PointDataset& ds, const GlobalClqTable& table, Vec2 x,
                              const LclqConfig& cfg, const SpatialIndex* index) {
  const int C = ds.num_categories();
  if (table.num_categories() != C)
    throw std::invalid_argument("global table size does not match dataset categories");
  const LclqVector v = lclq_vector(ds, Anchor::location(x), cfg, index);

  auto norm = [](const std::vector<double>& u) {
    double s = 0.0;
    for (double e : u) s += e * e;
    return std::sqrt(s);
  };
  const double nv = norm(v.values);
  std::vector<double> sims(C, 0.0);
  for (int c = 0; c < C; ++c) {
    const double ng = norm(table.rows[c]);
    if (nv < cfg.weight_floor || ng < cfg.weight_floor) continue;
    double dot = 0.0;
    for (int j = 0; j < C; ++j) dot += v.values[j] * table.rows[c][j];
    sims[c] = std::max(0.0, dot / (nv * ng));
  }
  double total = 0.0;
  for (double s : sims) total += s;
  if (total < cfg.weight_floor) return ProbVector::uniform(C);
  for (double& s : sims) s /= total;
  return ProbVector(std::move(sims));
}

}  // namespace sppa
