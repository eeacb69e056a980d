#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sppa/dataset.hpp"

namespace sppa {

enum class Split { train = 0, val = 1, test = 2 };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);  // throws std::invalid_argument

/// A full partition of dataset ids into train/val/test.
class SplitAssignment {
 public:
  /// Entries must be unique ids; they are kept sorted ascending.
  SplitAssignment(std::vector<std::pair<std::int64_t, Split>> entries, std::uint64_t seed);

  Split of(std::int64_t id) const;  // throws on unknown id
  bool has(std::int64_t id) const { return lookup_.count(id) != 0; }

  /// Ids assigned to one split, ascending.
  std::vector<std::int64_t> ids(Split s) const;

  const std::vector<std::pair<std::int64_t, Split>>& entries() const { return entries_; }
  std::array<std::size_t, 3> counts() const;
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::int64_t, Split>> entries_;  // ascending id
  std::unordered_map<std::int64_t, Split> lookup_;
  std::uint64_t seed_;
};

/// Stratified seeded split: within each category the ids are shuffled and cut
/// by the largest-remainder apportionment of `fractions`, so per-category
/// split sizes differ from fraction*count by less than one.
SplitAssignment split_dataset(const PointDataset& ds, const std::array<double, 3>& fractions,
                              std::uint64_t seed);

}  // namespace sppa
