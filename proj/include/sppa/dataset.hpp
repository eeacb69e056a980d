#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sppa/geometry.hpp"

namespace sppa {

/// Error raised by malformed input data. Carries the source name and a
/// 1-based line number when the problem is tied to a specific line.
class DataError : public std::runtime_error {
 public:
  DataError(std::string message, std::string source = {}, long line = 0);
  const std::string& source() const { return source_; }
  long line() const { return line_; }

 private:
  std::string source_;
  long line_;
};

struct PointRecord {
  std::int64_t id = 0;
  double x = 0.0;
  double y = 0.0;
  int category = 0;

  Vec2 pos() const { return {x, y}; }
};

/// Immutable categorized 2-D point set. Records keep their construction
/// order (category indices are assigned by first appearance on ingest);
/// an id-sorted position table is kept so kernel sums can always run in
/// ascending-id order.
///
/// Subsets built from a split may leave a category without points;
/// operations that need every category populated check counts themselves.
class PointDataset {
 public:
  PointDataset(std::vector<PointRecord> records, std::vector<std::string> category_names);

  std::size_t size() const { return records_.size(); }
  int num_categories() const { return static_cast<int>(category_names_.size()); }

  const std::vector<PointRecord>& records() const { return records_; }
  const PointRecord& record(std::size_t pos) const { return records_[pos]; }

  const std::vector<std::string>& category_names() const { return category_names_; }
  const std::string& category_name(int c) const;
  int category_index(std::string_view name) const;  // -1 when absent

  std::int64_t category_count(int c) const;
  const BBox& bounds() const { return bbox_; }

  /// Record positions ordered by ascending id.
  const std::vector<std::uint32_t>& positions_by_id() const { return by_id_; }
  std::optional<std::size_t> position_of(std::int64_t id) const;

  /// Filter to the given ids, keeping the full category table.
  PointDataset subset(std::span<const std::int64_t> ids) const;

 private:
  std::vector<PointRecord> records_;
  std::vector<std::string> category_names_;
  std::vector<std::int64_t> counts_;
  std::vector<std::uint32_t> by_id_;
  std::unordered_map<std::int64_t, std::uint32_t> id_to_pos_;
  BBox bbox_;
};

}  // namespace sppa
