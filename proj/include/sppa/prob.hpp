#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace sppa {

/// Per-category probability distribution. Entries are nonnegative and sum
/// to 1 within 1e-9 (checked on construction).
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t c) const { return values_[c]; }
  int size() const { return static_cast<int>(values_.size()); }

  static ProbVector uniform(int num_categories);

 private:
  std::vector<double> values_;
};

/// Argmax decision rule; ties resolve to the lowest index.
int predict(const ProbVector& p);

enum class ProbSource { visual, first_order, second_order, fused };

std::string_view prob_source_name(ProbSource s);
ProbSource prob_source_from_name(std::string_view name);

/// Probability vectors keyed by record id, all of one length, from a single
/// source. Iteration order is ascending id.
class ProbTable {
 public:
  ProbTable(ProbSource source, int num_categories);

  void insert(std::int64_t id, ProbVector p);  // throws on duplicate or length mismatch
  bool has(std::int64_t id) const { return rows_.count(id) != 0; }
  const ProbVector& at(std::int64_t id) const;  // throws on missing id

  const std::map<std::int64_t, ProbVector>& rows() const { return rows_; }
  std::vector<std::int64_t> ids() const;
  int num_categories() const { return num_categories_; }
  ProbSource source() const { return source_; }
  std::size_t size() const { return rows_.size(); }

 private:
  ProbSource source_;
  int num_categories_;
  std::map<std::int64_t, ProbVector> rows_;
};

}  // namespace sppa
