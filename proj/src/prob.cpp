#include "sppa/prob.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sppa {

namespace {
// Invariant tolerance plus a little floating-point headroom so convex
// combinations of vectors sitting at the boundary still construct.
constexpr double kSumTolerance = 1.000001e-9;
}  // namespace

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty probability vector");
  double sum = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("probability entries must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw std::invalid_argument("probability vector sums to " + std::to_string(sum));
}

ProbVector ProbVector::uniform(int num_categories) {
  if (num_categories < 1) throw std::invalid_argument("uniform needs >= 1 category");
  return ProbVector(std::vector<double>(num_categories, 1.0 / num_categories));
}

int predict(const ProbVector& p) {
  int best = 0;
  for (int c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = c;
  return best;
}

std::string_view prob_source_name(ProbSource s) {
  switch (s) {
    case ProbSource::visual: return "visual";
    case ProbSource::first_order: return "first_order";
    case ProbSource::second_order: return "second_order";
    case ProbSource::fused: return "fused";
  }
  throw std::logic_error("bad prob source");
}

ProbSource prob_source_from_name(std::string_view name) {
  if (name == "visual") return ProbSource::visual;
  if (name == "first_order") return ProbSource::first_order;
  if (name == "second_order") return ProbSource::second_order;
  if (name == "fused") return ProbSource::fused;
  throw std::invalid_argument("unknown prob source: " + std::string(name));
}

ProbTable::ProbTable(ProbSource source, int num_categories)
    : source_(source), num_categories_(num_categories) {
  if (num_categories < 1) throw std::invalid_argument("table needs >= 1 category");
}

void ProbTable::insert(std::int64_t id, ProbVector p) {
  if (p.size() != num_categories_) throw std::invalid_argument("probability vector length mismatch");
  if (!rows_.emplace(id, std::move(p)).second)
    throw std::invalid_argument("duplicate id in table: " + std::to_string(id));
}

const ProbVector& ProbTable::at(std::int64_t id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) throw std::invalid_argument("id not in table: " + std::to_string(id));
  return it->second;
}

std::vector<std::int64_t> ProbTable::ids() const {
  std::vector<std::int64_t> out;
  out.reserve(rows_.size());
  for (const auto& [id, p] : rows_) out.push_back(id);
  return out;
}

}  // namespace sppa
