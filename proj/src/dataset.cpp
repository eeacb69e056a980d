#include "sppa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace sppa {

DataError::DataError(std::string message, std::string source, long line)
    : std::runtime_error(source.empty()
                             ? message
                             : source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + message),
      source_(std::move(source)),
      line_(line) {}

PointDataset::PointDataset(std::vector<PointRecord> records, std::vector<std::string> category_names)
    : records_(std::move(records)), category_names_(std::move(category_names)) {
  if (category_names_.empty()) throw std::invalid_argument("dataset needs at least one category");
  std::unordered_set<std::string_view> seen;
  for (const auto& name : category_names_) {
    if (name.empty()) throw std::invalid_argument("empty category name");
    if (!seen.insert(name).second) throw std::invalid_argument("duplicate category name: " + name);
  }
  counts_.assign(category_names_.size(), 0);
  by_id_.reserve(records_.size());
  id_to_pos_.reserve(records_.size());
  for (std::size_t pos = 0; pos < records_.size(); ++pos) {
    const PointRecord& r = records_[pos];
    if (!std::isfinite(r.x) || !std::isfinite(r.y))
      throw std::invalid_argument("non-finite coordinate for id " + std::to_string(r.id));
    if (r.category < 0 || r.category >= num_categories())
      throw std::invalid_argument("category index out of range for id " + std::to_string(r.id));
    if (!id_to_pos_.emplace(r.id, static_cast<std::uint32_t>(pos)).second)
      throw std::invalid_argument("duplicate id " + std::to_string(r.id));
    ++counts_[r.category];
    bbox_.expand(r.pos());
    by_id_.push_back(static_cast<std::uint32_t>(pos));
  }
  std::sort(by_id_.begin(), by_id_.end(),
            [&](std::uint32_t a, std::uint32_t b) { return records_[a].id < records_[b].id; });
}

const std::string& PointDataset::category_name(int c) const {
  if (c < 0 || c >= num_categories()) throw std::invalid_argument("category index out of range");
  return category_names_[c];
}

int PointDataset::category_index(std::string_view name) const {
  for (std::size_t i = 0; i < category_names_.size(); ++i)
    if (category_names_[i] == name) return static_cast<int>(i);
  return -1;
}

std::int64_t PointDataset::category_count(int c) const {
  if (c < 0 || c >= num_categories()) throw std::invalid_argument("category index out of range");
  return counts_[c];
}

std::optional<std::size_t> PointDataset::position_of(std::int64_t id) const {
  auto it = id_to_pos_.find(id);
  if (it == id_to_pos_.end()) return std::nullopt;
  return it->second;
}

PointDataset PointDataset::subset(std::span<const std::int64_t> ids) const {
  std::unordered_set<std::int64_t> keep(ids.begin(), ids.end());
  std::vector<PointRecord> out;
  out.reserve(keep.size());
  for (const PointRecord& r : records_)
    if (keep.count(r.id)) out.push_back(r);
  return PointDataset(std::move(out), category_names_);
}

}  // namespace sppa
