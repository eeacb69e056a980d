#include "sppa/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace sppa {

void ProcessSpec::validate() const {
  if (region.empty() || !(region.area() > 0.0))
    throw std::invalid_argument("process region must have positive area");
  if (variant == Variant::homogeneous_poisson) {
    if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be > 0");
  } else {
    if (!(parent_intensity > 0.0)) throw std::invalid_argument("parent intensity must be > 0");
    if (!(mean_offspring > 0.0)) throw std::invalid_argument("mean offspring must be > 0");
    if (!(offspring_sigma > 0.0)) throw std::invalid_argument("offspring sigma must be > 0");
  }
  if (category < 0) throw std::invalid_argument("category must be >= 0");
}

std::vector<PointRecord> gen_points(const ProcessSpec& spec, std::int64_t first_id) {
  spec.validate();
  Rng rng(spec.seed);
  const BBox& r = spec.region;
  std::vector<PointRecord> out;
  auto emit = [&](double x, double y) {
    out.push_back({first_id + static_cast<std::int64_t>(out.size()), x, y, spec.category});
  };

  if (spec.variant == ProcessSpec::Variant::homogeneous_poisson) {
    const std::uint64_t n = rng.poisson(spec.intensity * r.area());
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
      emit(rng.uniform(r.min_x, r.max_x), rng.uniform(r.min_y, r.max_y));
    return out;
  }

  const std::uint64_t parents = rng.poisson(spec.parent_intensity * r.area());
  for (std::uint64_t p = 0; p < parents; ++p) {
    const double px = rng.uniform(r.min_x, r.max_x);
    const double py = rng.uniform(r.min_y, r.max_y);
    const std::uint64_t kids = rng.poisson(spec.mean_offspring);
    for (std::uint64_t k = 0; k < kids; ++k) {
      // Redraw the displacement until the child lands inside the region;
      // clipping instead would pile mass on the border.
      double x = px, y = py;
      for (int attempt = 0; attempt < 10000; ++attempt) {
        x = px + spec.offspring_sigma * rng.normal();
        y = py + spec.offspring_sigma * rng.normal();
        if (r.contains({x, y})) break;
        if (attempt == 9999) {  // pathological sigma; keep the draw defined
          x = rng.uniform(r.min_x, r.max_x);
          y = rng.uniform(r.min_y, r.max_y);
        }
      }
      emit(x, y);
    }
  }
  return out;
}

std::vector<PointRecord> uniform_labeled_points(std::int64_t n, int num_categories,
                                                const BBox& region, std::uint64_t seed,
                                                std::int64_t first_id) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (num_categories < 1) throw std::invalid_argument("need >= 1 category");
  if (region.empty() || !(region.area() > 0.0))
    throw std::invalid_argument("region must have positive area");
  Rng rng(seed);
  std::vector<PointRecord> out;
  out.reserve(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = rng.uniform(region.min_x, region.max_x);
    const double y = rng.uniform(region.min_y, region.max_y);
    const int cat = static_cast<int>(rng.below(num_categories));
    out.push_back({first_id + i, x, y, cat});
  }
  return out;
}

void OracleSpec::validate(int num_categories) const {
  if (num_categories < 2) throw std::invalid_argument("oracle needs >= 2 categories");
  if (!(accuracy > 0.0) || !(accuracy <= 1.0))
    throw std::invalid_argument("oracle accuracy must be in (0, 1]");
  if (!(concentration > 0.0) || !(concentration <= 1.0))
    throw std::invalid_argument("oracle concentration must be in (0, 1]");
  if (!(concentration > 1.0 / num_categories))
    throw std::invalid_argument("concentration must exceed 1/C so the argmax is the emitted label");
}

ProbTable noisy_visual_table(const std::vector<std::pair<std::int64_t, int>>& truth,
                             int num_categories, const OracleSpec& spec) {
  spec.validate(num_categories);
  Rng rng(spec.seed);
  ProbTable table(ProbSource::visual, num_categories);
  const double off_mass = (1.0 - spec.concentration) / (num_categories - 1);
  for (const auto& [id, label] : truth) {
    if (label < 0 || label >= num_categories)
      throw std::invalid_argument("truth label out of range for id " + std::to_string(id));
    int emitted = label;
    if (rng.uniform01() >= spec.accuracy) {
      // uniform over the wrong labels
      const std::uint64_t w = rng.below(static_cast<std::uint64_t>(num_categories) - 1);
      emitted = static_cast<int>(w) + (static_cast<int>(w) >= label ? 1 : 0);
    }
    std::vector<double> p(num_categories, off_mass);
    p[emitted] = spec.concentration;
    table.insert(id, ProbVector(std::move(p)));
  }
  return table;
}

}  // namespace sppa
