#include "sppa/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sppa/parallel.hpp"

namespace sppa {

namespace {
constexpr double kLogFloor = 1e-12;
}

void FusionWeights::validate() const {
  for (double w : {visual, first_order, second_order})
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("fusion weights must be finite and >= 0");
  if (std::abs(visual + first_order + second_order - 1.0) > 1e-9)
    throw std::invalid_argument("fusion weights must sum to 1");
}

ProbVector fuse(const FusionWeights& w, const ProbVector& visual, const ProbVector& first,
                const ProbVector& second) {
  w.validate();
  if (visual.size() != first.size() || visual.size() != second.size())
    throw std::invalid_argument("probability vector length mismatch");
  std::vector<double> out(visual.size());
  for (int c = 0; c < visual.size(); ++c)
    out[c] = w.visual * visual[c] + w.first_order * first[c] + w.second_order * second[c];
  return ProbVector(std::move(out));
}

namespace {

struct Candidate {
  FusionWeights w;
  std::int64_t correct = 0;
  double xent_sum = 0.0;
};

bool same_weights(const FusionWeights& a, const FusionWeights& b) {
  return a.visual == b.visual && a.first_order == b.first_order &&
         a.second_order == b.second_order;
}

// Total preference order: accuracy desc, cross-entropy asc, w_vis desc,
// w_1st desc. Cross-entropy sums that differ only by accumulated rounding
// (identical tables fused with different weights drift by ulps) count as
// tied, so the weight preference stays decisive.
bool better(const Candidate& a, const Candidate& b) {
  if (a.correct != b.correct) return a.correct > b.correct;
  const double tol =
      1e-9 * std::max(1.0, std::max(std::fabs(a.xent_sum), std::fabs(b.xent_sum)));
  if (std::fabs(a.xent_sum - b.xent_sum) > tol) return a.xent_sum < b.xent_sum;
  if (a.w.visual != b.w.visual) return a.w.visual > b.w.visual;
  return a.w.first_order > b.w.first_order;
}

}  // namespace

FitResult fit_weights(const ProbTable& visual, const ProbTable& first, const ProbTable& second,
                      const LabelMap& truth, std::span<const std::int64_t> ids,
                      const FitOptions& options) {
  if (ids.empty()) throw std::invalid_argument("empty id list");
  if (!(options.step > 0.0) || !(options.step <= 0.5))
    throw std::invalid_argument("step must be in (0, 0.5]");
  const int C = visual.num_categories();
  if (first.num_categories() != C || second.num_categories() != C)
    throw std::invalid_argument("tables disagree on category count");
  for (std::int64_t id : ids) {
    if (!visual.has(id) || !first.has(id) || !second.has(id))
      throw std::invalid_argument("id missing from a probability table: " + std::to_string(id));
    if (!truth.count(id)) throw std::invalid_argument("id missing from truth: " + std::to_string(id));
  }

  std::vector<Candidate> candidates;
  const int n_steps = static_cast<int>(std::floor(1.0 / options.step + 1e-9));
  for (int a = 0; a <= n_steps; ++a) {
    for (int b = 0; b <= n_steps - a; ++b) {
      if (!options.allow_first && b != 0) continue;
      FusionWeights w;
      w.visual = a * options.step;
      w.first_order = b * options.step;
      w.second_order = 1.0 - (a + b) * options.step;
      if (w.second_order < 1e-12) w.second_order = 0.0;
      if (!options.allow_second && w.second_order != 0.0) continue;
      candidates.push_back({w, 0, 0.0});
    }
  }
  const FusionWeights corners[3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  const bool corner_allowed[3] = {true, options.allow_first, options.allow_second};
  for (int k = 0; k < 3; ++k) {
    if (!corner_allowed[k]) continue;
    bool present = false;
    for (const Candidate& c : candidates)
      if (same_weights(c.w, corners[k])) {
        present = true;
        break;
      }
    if (!present) candidates.push_back({corners[k], 0, 0.0});
  }

  // Gather rows once; candidate scoring is then pure array arithmetic.
  const std::size_t n_ids = ids.size();
  std::vector<double> pv(n_ids * C), p1(n_ids * C), p2(n_ids * C);
  std::vector<int> labels(n_ids);
  for (std::size_t i = 0; i < n_ids; ++i) {
    const std::int64_t id = ids[i];
    const auto& a = visual.at(id).values();
    const auto& b = first.at(id).values();
    const auto& c = second.at(id).values();
    std::copy(a.begin(), a.end(), pv.begin() + i * C);
    std::copy(b.begin(), b.end(), p1.begin() + i * C);
    std::copy(c.begin(), c.end(), p2.begin() + i * C);
    labels[i] = truth.at(id);
    if (labels[i] < 0 || labels[i] >= C)
      throw std::invalid_argument("truth label out of range for id " + std::to_string(id));
  }

  auto score = [&](Candidate& cand) {
    std::vector<double> fused(C);
    for (std::size_t i = 0; i < n_ids; ++i) {
      const double* a = pv.data() + i * C;
      const double* b = p1.data() + i * C;
      const double* d = p2.data() + i * C;
      for (int c = 0; c < C; ++c)
        fused[c] = cand.w.visual * a[c] + cand.w.first_order * b[c] + cand.w.second_order * d[c];
      int top = 0;
      for (int c = 1; c < C; ++c)
        if (fused[c] > fused[top]) top = c;
      if (top == labels[i]) ++cand.correct;
      cand.xent_sum += -std::log(std::max(fused[labels[i]], kLogFloor));
    }
  };

  const std::int64_t n_cand = static_cast<std::int64_t>(candidates.size());
#pragma omp parallel for schedule(static) num_threads(max_threads())
  for (std::int64_t i = 0; i < n_cand; ++i) score(candidates[i]);

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (better(candidates[i], candidates[best])) best = i;

  FitResult result;
  result.weights = candidates[best].w;
  result.accuracy = static_cast<double>(candidates[best].correct) / static_cast<double>(ids.size());
  result.cross_entropy = candidates[best].xent_sum / static_cast<double>(ids.size());
  result.candidates = candidates.size();
  result.sample_count = ids.size();
  for (int k = 0; k < 3; ++k) {
    Candidate corner{corners[k], 0, 0.0};
    score(corner);
    result.corner_accuracy[k] =
        static_cast<double>(corner.correct) / static_cast<double>(ids.size());
  }
  return result;
}

std::string render_fit_report(const FitResult& r) {
  std::ostringstream os;
  char buf[128];
  os << "fusion weight fit\n";
  std::snprintf(buf, sizeof buf, "samples      %zu\n", r.sample_count);
  os << buf;
  std::snprintf(buf, sizeof buf, "candidates   %zu\n", r.candidates);
  os << buf;
  std::snprintf(buf, sizeof buf, "visual alone        %.3f\n", r.corner_accuracy[0]);
  os << buf;
  std::snprintf(buf, sizeof buf, "first-order alone   %.3f\n", r.corner_accuracy[1]);
  os << buf;
  std::snprintf(buf, sizeof buf, "second-order alone  %.3f\n", r.corner_accuracy[2]);
  os << buf;
  std::snprintf(buf, sizeof buf, "fused (winner)      %.3f\n", r.accuracy);
  os << buf;
  std::snprintf(buf, sizeof buf, "winner weights      w_vis=%.17g w_1st=%.17g w_2nd=%.17g\n",
                r.weights.visual, r.weights.first_order, r.weights.second_order);
  os << buf;
  std::snprintf(buf, sizeof buf, "winner mean -log p  %.6f\n", r.cross_entropy);
  os << buf;
  return os.str();
}

EvalReport evaluate(const LabelMap& predictions, const LabelMap& truth, int num_categories) {
  if (num_categories < 1) throw std::invalid_argument("need >= 1 category");
  if (predictions.size() != truth.size())
    throw std::invalid_argument("prediction and truth id sets differ in size");
  EvalReport r;
  r.confusion.assign(num_categories, std::vector<std::int64_t>(num_categories, 0));
  for (const auto& [id, t] : truth) {
    auto it = predictions.find(id);
    if (it == predictions.end())
      throw std::invalid_argument("id missing from predictions: " + std::to_string(id));
    const int p = it->second;
    if (t < 0 || t >= num_categories || p < 0 || p >= num_categories)
      throw std::invalid_argument("label out of range for id " + std::to_string(id));
    ++r.confusion[t][p];
  }
  r.samples = static_cast<std::int64_t>(truth.size());
  std::int64_t trace = 0;
  r.per_category.assign(num_categories, 0.0);
  for (int c = 0; c < num_categories; ++c) {
    std::int64_t row = 0;
    for (int p = 0; p < num_categories; ++p) row += r.confusion[c][p];
    trace += r.confusion[c][c];
    if (row > 0)
      r.per_category[c] = static_cast<double>(r.confusion[c][c]) / static_cast<double>(row);
  }
  if (r.samples > 0) r.accuracy = static_cast<double>(trace) / static_cast<double>(r.samples);
  return r;
}

LabelMap predict_table(const ProbTable& table) {
  LabelMap out;
  for (const auto& [id, p] : table.rows()) out[id] = predict(p);
  return out;
}

std::string render_eval_report(const EvalReport& r, const std::vector<std::string>& names) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "samples   %lld\n", static_cast<long long>(r.samples));
  os << buf;
  std::snprintf(buf, sizeof buf, "accuracy  %.3f\n", r.accuracy);
  os << buf;
  std::size_t width = 8;
  for (const auto& n : names) width = std::max(width, n.size());
  os << "per-category accuracy\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::int64_t row = 0;
    for (std::int64_t v : r.confusion[c]) row += v;
    std::snprintf(buf, sizeof buf, "  %-*s  %8lld  %.3f\n", static_cast<int>(width),
                  names[c].c_str(), static_cast<long long>(row), r.per_category[c]);
    os << buf;
  }
  os << "confusion matrix (row = truth, column = prediction)\n";
  for (std::size_t c = 0; c < names.size(); ++c) {
    std::snprintf(buf, sizeof buf, "  %-*s", static_cast<int>(width), names[c].c_str());
    os << buf;
    for (std::int64_t v : r.confusion[c]) {
      std::snprintf(buf, sizeof buf, " %8lld", static_cast<long long>(v));
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string eval_report_csv(const EvalReport& r, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "truth";
  for (const auto& n : names) os << "," << n;
  os << ",accuracy\n";
  char buf[64];
  for (std::size_t c = 0; c < names.size(); ++c) {
    os << names[c];
    for (std::int64_t v : r.confusion[c]) os << "," << v;
    std::snprintf(buf, sizeof buf, ",%.17g", r.per_category[c]);
    os << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.17g", r.accuracy);
  os << "overall";
  for (std::size_t c = 0; c < names.size(); ++c) os << ",";
  os << buf << "\n";
  return os.str();
}

std::string format_accuracy_row(const std::string& name, double validation_accuracy,
                                double test_accuracy) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %.3f %.3f", name.c_str(), validation_accuracy,
                test_accuracy);
  return std::string(buf);
}

}  // namespace sppa
