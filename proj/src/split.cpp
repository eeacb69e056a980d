#include "sppa/split.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sppa/rng.hpp"

namespace sppa {

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  throw std::logic_error("bad split value");
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  throw std::invalid_argument("unknown split name: " + std::string(name));
}

SplitAssignment::SplitAssignment(std::vector<std::pair<std::int64_t, Split>> entries,
                                 std::uint64_t seed)
    : entries_(std::move(entries)), seed_(seed) {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  lookup_.reserve(entries_.size());
  for (const auto& [id, s] : entries_)
    if (!lookup_.emplace(id, s).second)
      throw std::invalid_argument("duplicate id in split: " + std::to_string(id));
}

Split SplitAssignment::of(std::int64_t id) const {
  auto it = lookup_.find(id);
  if (it == lookup_.end()) throw std::invalid_argument("id not in split: " + std::to_string(id));
  return it->second;
}

std::vector<std::int64_t> SplitAssignment::ids(Split s) const {
  std::vector<std::int64_t> out;
  for (const auto& [id, sp] : entries_)
    if (sp == s) out.push_back(id);
  return out;
}

std::array<std::size_t, 3> SplitAssignment::counts() const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (const auto& [id, sp] : entries_) ++c[static_cast<int>(sp)];
  return c;
}

namespace {

// Largest-remainder apportionment of n into three parts proportional to f.
// Remainder ties go to train, then val, then test.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& f) {
  std::array<std::size_t, 3> base{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = f[i] * static_cast<double>(n);
    base[i] = static_cast<std::size_t>(std::floor(quota));
    rem[i] = quota - std::floor(quota);
    assigned += base[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++base[order[k % 3]];
  return base;
}

}  // namespace

SplitAssignment split_dataset(const PointDataset& ds, const std::array<double, 3>& fractions,
                              std::uint64_t seed) {
  if (ds.size() == 0) throw std::invalid_argument("cannot split an empty dataset");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("split fractions must be nonnegative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split fractions must sum to 1");

  Rng rng(seed);
  std::vector<std::pair<std::int64_t, Split>> entries;
  entries.reserve(ds.size());
  for (int c = 0; c < ds.num_categories(); ++c) {
    std::vector<std::int64_t> ids;
    for (std::uint32_t pos : ds.positions_by_id())
      if (ds.record(pos).category == c) ids.push_back(ds.record(pos).id);
    // Fisher-Yates on the ascending-id list
    for (std::size_t i = ids.size(); i > 1; --i)
      std::swap(ids[i - 1], ids[rng.below(i)]);
    const auto sizes = apportion(ids.size(), fractions);
    std::size_t at = 0;
    for (int s = 0; s < 3; ++s)
      for (std::size_t k = 0; k < sizes[s]; ++k, ++at)
        entries.emplace_back(ids[at], static_cast<Split>(s));
  }
  return SplitAssignment(std::move(entries), seed);
}

}  // namespace sppa
