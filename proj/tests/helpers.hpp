#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "sppa/dataset.hpp"

namespace test_util {

/// |a - b| <= tol * max(1, |a|, |b|)
inline bool close(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

/// Relative comparison against a reference; exact zero must match exactly.
inline bool rel_close(double value, double reference, double tol) {
  if (reference == 0.0) return value == 0.0;
  return std::fabs(value - reference) <= tol * std::fabs(reference);
}

inline sppa::PointDataset make_dataset(
    const std::vector<std::tuple<std::int64_t, double, double, int>>& rows, int num_categories) {
  std::vector<sppa::PointRecord> records;
  for (const auto& [id, x, y, c] : rows) records.push_back({id, x, y, c});
  std::vector<std::string> names;
  for (int c = 0; c < num_categories; ++c) names.push_back("c" + std::to_string(c));
  return sppa::PointDataset(std::move(records), std::move(names));
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("sppa_test_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace test_util
