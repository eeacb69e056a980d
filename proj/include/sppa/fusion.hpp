#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sppa/prob.hpp"

namespace sppa {

/// Convex weights over the three probability sources.
struct FusionWeights {
  double visual = 1.0;
  double first_order = 0.0;
  double second_order = 0.0;

  void validate() const;  // nonnegative, sum 1 within 1e-9
};

/// Weighted sum of the three source distributions; convexity keeps the
/// result a valid distribution.
ProbVector fuse(const FusionWeights& w, const ProbVector& visual, const ProbVector& first,
                const ProbVector& second);

using LabelMap = std::map<std::int64_t, int>;

struct FitOptions {
  double step = 0.01;
  /// Restrict the search to candidates with zero weight on a source.
  bool allow_first = true;
  bool allow_second = true;
};

struct FitResult {
  FusionWeights weights;
  double accuracy = 0.0;       // of the winner on the fitting ids
  double cross_entropy = 0.0;  // mean -log p_truth of the winner
  std::array<double, 3> corner_accuracy{};  // visual / first / second alone
  std::size_t candidates = 0;
  std::size_t sample_count = 0;
};

/// Exhaustive search over the simplex lattice {(a*step, b*step, 1-(a+b)*step)}
/// plus the three corners. The winner maximizes accuracy on `ids`; ties break
/// by lower mean cross-entropy (probabilities floored at 1e-12 in the log),
/// then larger visual weight, then larger first-order weight. Deterministic;
/// candidates are evaluated in parallel.
FitResult fit_weights(const ProbTable& visual, const ProbTable& first, const ProbTable& second,
                      const LabelMap& truth, std::span<const std::int64_t> ids,
                      const FitOptions& options = {});

std::string render_fit_report(const FitResult& r);

struct EvalReport {
  double accuracy = 0.0;
  std::vector<double> per_category;           // diagonal / truth count, 0 when unseen
  std::vector<std::vector<std::int64_t>> confusion;  // row = truth, column = prediction
  std::int64_t samples = 0;
};

/// Accuracy and confusion over matching id sets.
EvalReport evaluate(const LabelMap& predictions, const LabelMap& truth, int num_categories);

/// Argmax predictions for every row of a table.
LabelMap predict_table(const ProbTable& table);

std::string render_eval_report(const EvalReport& r, const std::vector<std::string>& category_names);
std::string eval_report_csv(const EvalReport& r, const std::vector<std::string>& category_names);

/// One comparison row, e.g. "visual  0.694  0.683".
std::string format_accuracy_row(const std::string& name, double validation_accuracy,
                                double test_accuracy);

}  // namespace sppa
