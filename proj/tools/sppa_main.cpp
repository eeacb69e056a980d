// sppa: spatial point pattern statistics toolkit.
//
// Subcommands cover the full pipeline: ingest -> split -> locprobs /
// intensity -> fuse-fit -> evaluate, plus synthetic data generation and
// heatmap export. Every command writes its declared outputs atomically and
// drops a key=value run manifest beside the primary output. Exit codes:
// 0 success, 1 usage error, 2 data error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sppa/csv.hpp"
#include "sppa/dataset.hpp"
#include "sppa/fusion.hpp"
#include "sppa/kde.hpp"
#include "sppa/lclq.hpp"
#include "sppa/parallel.hpp"
#include "sppa/pgm.hpp"
#include "sppa/prob.hpp"
#include "sppa/rng.hpp"
#include "sppa/split.hpp"
#include "sppa/synth.hpp"
#include "sppa/textio.hpp"
#include "sppa/version.hpp"

namespace fs = std::filesystem;
using namespace sppa;

namespace {

// ---------------------------------------------------------------------------
// shared helpers

struct Manifest {
  KeyValues kv;

  explicit Manifest(const std::string& command) {
    kv.emplace_back("tool", "sppa");
    kv.emplace_back("version", kVersion);
    kv.emplace_back("command", command);
  }
  void add(const std::string& key, const std::string& value) { kv.emplace_back(key, value); }
  void add(const std::string& key, double value) { kv.emplace_back(key, format_double(value)); }
  void add(const std::string& key, long long value) { kv.emplace_back(key, std::to_string(value)); }
  void add_bool(const std::string& key, bool value) { kv.emplace_back(key, value ? "1" : "0"); }
  void write(const fs::path& path) const { atomic_write_file(path, render_key_values(kv)); }
};

fs::path manifest_path(const std::string& explicit_path, const std::string& primary_output) {
  if (!explicit_path.empty()) return explicit_path;
  return primary_output + ".manifest";
}

PointDataset load_dataset(const std::string& path) {
  return read_dataset_csv(read_file(path), path);
}

SplitAssignment load_split(const std::string& path) {
  return read_split_csv(read_file(path), path);
}

ProbTable load_prob_table(const std::string& path, ProbSource source) {
  return read_prob_table_csv(read_file(path), path, source);
}

std::vector<std::int64_t> subset_ids(const PointDataset& ds, const SplitAssignment* split,
                                     const std::string& which) {
  std::vector<std::int64_t> out;
  if (which == "all") {
    for (std::uint32_t pos : ds.positions_by_id()) out.push_back(ds.record(pos).id);
    return out;
  }
  if (split == nullptr) throw CLI::RequiredError("--split (needed for subset '" + which + "')");
  return split->ids(split_from_name(which));
}

PointDataset fit_dataset(const PointDataset& ds, const SplitAssignment* split,
                         const std::string& fit_on) {
  if (fit_on == "all") return ds;
  if (split == nullptr) throw CLI::RequiredError("--split (needed for --fit-on " + fit_on + ")");
  return ds.subset(split->ids(split_from_name(fit_on)));
}

/// Split view in which every dataset point is a training point.
SplitAssignment all_train_split(const PointDataset& ds) {
  std::vector<std::pair<std::int64_t, Split>> entries;
  entries.reserve(ds.size());
  for (std::uint32_t pos : ds.positions_by_id())
    entries.emplace_back(ds.record(pos).id, Split::train);
  return SplitAssignment(std::move(entries), 0);
}

void parse_triple(const std::string& text, std::array<double, 3>& out) {
  const auto fields = [&] {
    std::vector<std::string> f;
    std::size_t at = 0;
    while (true) {
      const std::size_t comma = text.find(',', at);
      if (comma == std::string::npos) {
        f.push_back(text.substr(at));
        return f;
      }
      f.push_back(text.substr(at, comma - at));
      at = comma + 1;
    }
  }();
  if (fields.size() != 3)
    throw CLI::ValidationError("fractions", "expected three comma-separated values");
  for (int i = 0; i < 3; ++i) out[i] = parse_double(fields[i]);
}

// Stable per-class seed derivation (splitmix64 step).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t lane) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (lane + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::pair<std::int64_t, int>> truth_pairs(const PointDataset& ds) {
  std::vector<std::pair<std::int64_t, int>> out;
  out.reserve(ds.size());
  for (std::uint32_t pos : ds.positions_by_id())
    out.emplace_back(ds.record(pos).id, ds.record(pos).category);
  return out;
}

// Expands `--config FILE` (key=value lines, # comments) into --key=value
// tokens placed right before the other flags; since every option takes the
// last occurrence, explicit command-line flags override the file.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
      config_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + i);
    } else {
      ++i;
    }
  }
  if (config_path.empty()) return args;
  if (args.empty() || args[0].front() == '-')
    throw std::invalid_argument("--config requires a subcommand");
  const KeyValues kv = parse_key_values(read_file(config_path), config_path);
  std::vector<std::string> out;
  out.push_back(args[0]);
  for (const auto& [key, value] : kv) out.push_back("--" + key + "=" + value);
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

std::string weights_line(const FusionWeights& w) {
  return "w_vis=" + format_double(w.visual) + " w_1st=" + format_double(w.first_order) +
         " w_2nd=" + format_double(w.second_order) + "\n";
}

FusionWeights parse_weights_file(const std::string& path) {
  const std::string text = read_file(path);
  FusionWeights w{-1.0, -1.0, -1.0};
  std::size_t at = 0;
  while (at < text.size()) {
    std::size_t end = text.find_first_of(" \t\n\r", at);
    if (end == std::string::npos) end = text.size();
    const std::string_view token(text.data() + at, end - at);
    at = end + 1;
    if (token.empty()) continue;
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) throw DataError("expected name=value tokens", path);
    const std::string_view name = token.substr(0, eq);
    const double value = parse_double(token.substr(eq + 1));
    if (name == "w_vis")
      w.visual = value;
    else if (name == "w_1st")
      w.first_order = value;
    else if (name == "w_2nd")
      w.second_order = value;
    else
      throw DataError("unknown weight name: " + std::string(name), path);
  }
  if (w.visual < 0.0 || w.first_order < 0.0 || w.second_order < 0.0)
    throw DataError("weights file must define w_vis, w_1st and w_2nd", path);
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what(), path);
  }
  return w;
}

// ---------------------------------------------------------------------------
// command options

struct IngestOpts {
  std::string in, out, manifest;
};

struct SplitOpts {
  std::string dataset, out, manifest;
  std::string fractions = "0.7,0.15,0.15";
  std::uint64_t seed = 0;
};

struct SynthOpts {
  std::string preset;
  std::int64_t n = 0;
  int classes = 0;
  std::uint64_t seed = 0;
  std::string out, manifest;
  std::string visual_out;
  double visual_accuracy = 0.68;
  double visual_gamma = 0.8;
  std::int64_t visual_seed = -1;  // default: derived from seed
};

struct IntensityOpts {
  std::string dataset, split, out, manifest;
  std::string fit_on = "all";
  std::string category;
  double h = 0.0;
  double cutoff = 5.0;
  bool no_truncation = false;
  std::string grid;
};

struct HeatmapOpts {
  std::string raster, out, manifest;
  std::string mode = "pgm16";
};

struct LclqOpts {
  std::string dataset, split, out, manifest;
  std::string points_from = "all";
  double h = 0.0;
  double cutoff = 5.0;
  bool no_truncation = false;
  bool self_correction = false;
};

struct GlobalClqOpts {
  std::string dataset, split, out, manifest;
  double h = 0.0;
  double cutoff = 5.0;
  bool no_truncation = false;
  bool self_correction = false;
};

struct LocProbsOpts {
  std::string dataset, split, manifest;
  std::string fit_on = "train";
  std::string targets = "val,test";
  double kde_h = 0.0;
  double lclq_h = 0.0;
  double cutoff = 5.0;
  bool no_truncation = false;
  std::string first_out, second_out;
};

struct FuseFitOpts {
  std::string visual, first, second, dataset, split, out, report_out, manifest;
  std::string subset = "val";
  double step = 0.01;
  bool drop_first = false;
  bool drop_second = false;
};

struct EvaluateOpts {
  std::string probs;
  std::string visual, first, second, weights;
  std::string dataset, split, manifest;
  std::string subset = "all";
  std::string report_out, csv_out;
};

// ---------------------------------------------------------------------------
// command bodies

void run_ingest(const IngestOpts& o) {
  const PointDataset ds = load_dataset(o.in);
  atomic_write_file(o.out, write_dataset_csv(ds));

  Manifest m("ingest");
  m.add("input.dataset", o.in);
  m.add("output.dataset", o.out);
  m.write(manifest_path(o.manifest, o.out));

  std::printf("ingested %zu records, %d categories\n", ds.size(), ds.num_categories());
  for (int c = 0; c < ds.num_categories(); ++c)
    std::printf("  %-16s %8lld\n", ds.category_name(c).c_str(),
                static_cast<long long>(ds.category_count(c)));
}

void run_split(const SplitOpts& o) {
  const PointDataset ds = load_dataset(o.dataset);
  std::array<double, 3> fractions{};
  parse_triple(o.fractions, fractions);
  SplitAssignment split = [&] {
    try {
      return split_dataset(ds, fractions, o.seed);
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError("--fractions", e.what());
    }
  }();
  atomic_write_file(o.out, write_split_csv(split));

  Manifest m("split");
  m.add("input.dataset", o.dataset);
  m.add("param.fractions", o.fractions);
  m.add("param.seed", static_cast<long long>(o.seed));
  m.add("rng", Rng::kName);
  m.add("output.split", o.out);
  m.write(manifest_path(o.manifest, o.out));

  const auto counts = split.counts();
  std::printf("split sizes: train=%zu val=%zu test=%zu\n", counts[0], counts[1], counts[2]);
}

void run_synth(const SynthOpts& o) {
  const int classes = o.classes > 0 ? o.classes : (o.preset == "clustered" ? 6 : 3);
  BBox unit;
  unit.expand({0.0, 0.0});
  unit.expand({1.0, 1.0});

  std::vector<PointRecord> records;
  std::vector<std::string> names;
  for (int c = 0; c < classes; ++c) names.push_back("c" + std::to_string(c));

  if (o.preset == "csr") {
    records = uniform_labeled_points(o.n, classes, unit, o.seed);
  } else {  // clustered: one Thomas process per class in overlapping windows
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(classes))));
    const int rows = (classes + cols - 1) / cols;
    const double cw = 1.0 / cols, ch = 1.0 / rows;
    const double mx = 0.35 * cw, my = 0.35 * ch;
    const double per_class = static_cast<double>(o.n) / classes;
    for (int c = 0; c < classes; ++c) {
      const int gx = c % cols, gy = c / cols;
      BBox region;
      region.expand({std::max(0.0, gx * cw - mx), std::max(0.0, gy * ch - my)});
      region.expand({std::min(1.0, (gx + 1) * cw + mx), std::min(1.0, (gy + 1) * ch + my)});
      ProcessSpec spec;
      spec.variant = ProcessSpec::Variant::thomas_cluster;
      spec.region = region;
      spec.parent_intensity = 8.0 / region.area();
      spec.mean_offspring = per_class / 8.0;
      spec.offspring_sigma = 0.15 * std::min(cw, ch);
      spec.category = c;
      spec.seed = derive_seed(o.seed, static_cast<std::uint64_t>(c));
      auto pts = gen_points(spec, static_cast<std::int64_t>(records.size()));
      records.insert(records.end(), pts.begin(), pts.end());
    }
  }

  PointDataset ds(std::move(records), names);
  for (int c = 0; c < classes; ++c)
    if (ds.category_count(c) == 0)
      throw DataError("class " + names[c] + " received no points; raise --n or change --seed");
  atomic_write_file(o.out, write_dataset_csv(ds));

  Manifest m("synth");
  m.add("param.preset", o.preset);
  m.add("param.n", static_cast<long long>(o.n));
  m.add("param.classes", static_cast<long long>(classes));
  m.add("param.seed", static_cast<long long>(o.seed));
  m.add("rng", Rng::kName);
  m.add("output.dataset", o.out);

  if (!o.visual_out.empty()) {
    OracleSpec oracle;
    oracle.accuracy = o.visual_accuracy;
    oracle.concentration = o.visual_gamma;
    oracle.seed = o.visual_seed >= 0 ? static_cast<std::uint64_t>(o.visual_seed)
                                     : derive_seed(o.seed, 0xFEEDULL);
    const ProbTable table = noisy_visual_table(truth_pairs(ds), classes, oracle);
    atomic_write_file(o.visual_out, write_prob_table_csv(table));
    m.add("param.visual_accuracy", o.visual_accuracy);
    m.add("param.visual_gamma", o.visual_gamma);
    m.add("param.visual_seed", static_cast<long long>(oracle.seed));
    m.add("output.visual", o.visual_out);
  }
  m.write(manifest_path(o.manifest, o.out));
  std::printf("generated %zu points in %d classes\n", ds.size(), classes);
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> f;
  std::size_t at = 0;
  while (true) {
    const std::size_t comma = text.find(',', at);
    if (comma == std::string::npos) {
      f.push_back(text.substr(at));
      break;
    }
    f.push_back(text.substr(at, comma - at));
    at = comma + 1;
  }
  if (f.size() != 5) throw CLI::ValidationError("--grid", "expected x0,y0,cell,width,height");
  GridSpec g;
  g.x0 = parse_double(f[0]);
  g.y0 = parse_double(f[1]);
  g.cell = parse_double(f[2]);
  g.width = static_cast<int>(parse_int(f[3]));
  g.height = static_cast<int>(parse_int(f[4]));
  g.validate();
  return g;
}

void run_intensity(const IntensityOpts& o) {
  const PointDataset full = load_dataset(o.dataset);
  std::optional<SplitAssignment> split;
  if (!o.split.empty()) split = load_split(o.split);
  const PointDataset ds = fit_dataset(full, split ? &*split : nullptr, o.fit_on);

  const int category = ds.category_index(o.category);
  if (category < 0) throw DataError("unknown category: " + o.category, o.dataset);
  if (ds.category_count(category) < 1)
    throw DataError("category has no points in the chosen subset: " + o.category, o.dataset);

  KdeConfig cfg;
  cfg.bandwidth = o.h;
  cfg.cutoff_multiplier = o.cutoff;
  cfg.truncation = !o.no_truncation;
  const GridSpec grid = parse_grid(o.grid);

  std::optional<SpatialIndex> index;
  if (cfg.truncation) index.emplace(ds, cfg.cutoff_radius());
  const Raster raster = intensity_raster(ds, category, grid, cfg, index ? &*index : nullptr);
  atomic_write_file(o.out, render_raster_text(raster));

  Manifest m("intensity");
  m.add("input.dataset", o.dataset);
  if (!o.split.empty()) m.add("input.split", o.split);
  m.add("param.fit_on", o.fit_on);
  m.add("param.category", o.category);
  m.add("param.h", o.h);
  m.add("param.cutoff", o.cutoff);
  m.add_bool("param.truncation", cfg.truncation);
  m.add("param.grid", o.grid);
  m.add("output.raster", o.out);
  m.write(manifest_path(o.manifest, o.out));
  std::printf("intensity raster %dx%d for '%s' written\n", grid.width, grid.height,
              o.category.c_str());
}

void run_heatmap(const HeatmapOpts& o) {
  const Raster raster = parse_raster_text(read_file(o.raster), o.raster);
  const PgmMode mode = pgm_mode_from_name(o.mode);
  write_pgm_with_sidecar(o.out, raster, mode);

  Manifest m("heatmap");
  m.add("input.raster", o.raster);
  m.add("param.mode", o.mode);
  m.add("output.image", o.out);
  m.add("output.sidecar", o.out + ".txt");
  m.write(manifest_path(o.manifest, o.out));
  std::printf("heatmap written to %s\n", o.out.c_str());
}

LclqConfig lclq_config(double h, double cutoff, bool no_truncation, bool self_correction) {
  LclqConfig cfg;
  cfg.bandwidth = h;
  cfg.cutoff_multiplier = cutoff;
  cfg.truncation = !no_truncation;
  cfg.self_correction = self_correction;
  return cfg;
}

void run_lclq(const LclqOpts& o) {
  const PointDataset full = load_dataset(o.dataset);
  std::optional<SplitAssignment> split;
  if (!o.split.empty()) split = load_split(o.split);
  const PointDataset ds = fit_dataset(full, split ? &*split : nullptr, o.points_from);
  if (ds.size() < 2) throw DataError("need at least two points", o.dataset);
  for (int c = 0; c < ds.num_categories(); ++c)
    if (ds.category_count(c) < 1)
      throw DataError("category has no points in the chosen subset: " + ds.category_name(c),
                      o.dataset);

  const LclqConfig cfg = lclq_config(o.h, o.cutoff, o.no_truncation, o.self_correction);
  cfg.validate();
  std::optional<SpatialIndex> index;
  if (cfg.truncation) index.emplace(ds, cfg.cutoff_radius());

  std::vector<std::int64_t> ids;
  std::vector<Anchor> anchors;
  for (std::uint32_t pos : ds.positions_by_id()) {
    ids.push_back(ds.record(pos).id);
    anchors.push_back(Anchor::point(ds.record(pos).id));
  }
  const std::vector<LclqVector> vectors =
      lclq_vectors(ds, anchors, cfg, index ? &*index : nullptr);
  atomic_write_file(o.out, write_lclq_batch_csv(ids, vectors));

  Manifest m("lclq");
  m.add("input.dataset", o.dataset);
  if (!o.split.empty()) m.add("input.split", o.split);
  m.add("param.points_from", o.points_from);
  m.add("param.h", o.h);
  m.add("param.cutoff", o.cutoff);
  m.add_bool("param.truncation", cfg.truncation);
  m.add_bool("param.self_correction", cfg.self_correction);
  m.add("output.vectors", o.out);
  m.write(manifest_path(o.manifest, o.out));

  // Mean LCLQ toward each category over non-isolated anchors.
  std::printf("anchors %zu\n", vectors.size());
  std::size_t isolated = 0;
  for (const auto& v : vectors)
    if (v.isolated) ++isolated;
  for (int c = 0; c < ds.num_categories(); ++c) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& v : vectors) {
      if (v.isolated) continue;
      sum += v.values[c];
      ++n;
    }
    std::printf("  mean lclq -> %-16s %.4f\n", ds.category_name(c).c_str(),
                n ? sum / static_cast<double>(n) : 0.0);
  }
  if (isolated) std::printf("  isolated anchors: %zu\n", isolated);
}

void run_globalclq(const GlobalClqOpts& o) {
  const PointDataset ds = load_dataset(o.dataset);
  const SplitAssignment split = load_split(o.split);
  const LclqConfig cfg = lclq_config(o.h, o.cutoff, o.no_truncation, o.self_correction);
  const GlobalClqTable table = [&] {
    try {
      return global_clq(ds, split, cfg);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), o.dataset);
    }
  }();
  atomic_write_file(o.out, write_global_clq_csv(table, ds.category_names()));

  Manifest m("globalclq");
  m.add("input.dataset", o.dataset);
  m.add("input.split", o.split);
  m.add("param.h", o.h);
  m.add("param.cutoff", o.cutoff);
  m.add_bool("param.truncation", cfg.truncation);
  m.add_bool("param.self_correction", cfg.self_correction);
  m.add("output.table", o.out);
  m.write(manifest_path(o.manifest, o.out));
  std::printf("global colocation table with %d rows written\n", table.num_categories());
}

void run_locprobs(const LocProbsOpts& o) {
  if (o.first_out.empty() && o.second_out.empty())
    throw CLI::ValidationError("locprobs", "need --first-out and/or --second-out");
  const PointDataset full = load_dataset(o.dataset);
  const SplitAssignment split = load_split(o.split);
  const PointDataset fit = [&] {
    try {
      return fit_dataset(full, &split, o.fit_on);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), o.split);
    }
  }();
  if (fit.size() < 2) throw DataError("need at least two fitting points", o.dataset);
  for (int c = 0; c < fit.num_categories(); ++c)
    if (fit.category_count(c) < 1)
      throw DataError("category has no fitting points: " + fit.category_name(c), o.dataset);

  // target ids, ascending, from the comma-separated subset list
  std::vector<std::int64_t> targets;
  {
    std::size_t at = 0;
    while (at <= o.targets.size()) {
      std::size_t comma = o.targets.find(',', at);
      if (comma == std::string::npos) comma = o.targets.size();
      const std::string which = o.targets.substr(at, comma - at);
      at = comma + 1;
      if (which.empty()) continue;
      const auto ids = subset_ids(full, &split, which);
      targets.insert(targets.end(), ids.begin(), ids.end());
      if (at > o.targets.size()) break;
    }
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  }
  if (targets.empty()) throw DataError("no target points selected", o.split);

  Manifest m("locprobs");
  m.add("input.dataset", o.dataset);
  m.add("input.split", o.split);
  m.add("param.fit_on", o.fit_on);
  m.add("param.targets", o.targets);
  m.add("param.cutoff", o.cutoff);
  m.add_bool("param.truncation", !o.no_truncation);

  // Resolve target positions up front; the parallel loops below must not throw.
  const std::int64_t n_targets = static_cast<std::int64_t>(targets.size());
  std::vector<Vec2> positions(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto pos = full.position_of(targets[i]);
    if (!pos) throw DataError("target id not in dataset: " + std::to_string(targets[i]), o.dataset);
    positions[i] = full.record(*pos).pos();
  }

  if (!o.first_out.empty()) {
    KdeConfig cfg;
    cfg.bandwidth = o.kde_h;
    cfg.cutoff_multiplier = o.cutoff;
    cfg.truncation = !o.no_truncation;
    cfg.validate();
    std::optional<SpatialIndex> index;
    if (cfg.truncation) index.emplace(fit, cfg.cutoff_radius());
    std::vector<std::optional<ProbVector>> rows(targets.size());
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::int64_t i = 0; i < n_targets; ++i)
      rows[i] = first_order_probs(fit, positions[i], cfg, index ? &*index : nullptr);
    ProbTable table(ProbSource::first_order, fit.num_categories());
    for (std::size_t i = 0; i < targets.size(); ++i) table.insert(targets[i], std::move(*rows[i]));
    atomic_write_file(o.first_out, write_prob_table_csv(table));
    m.add("param.kde_h", o.kde_h);
    m.add("output.first", o.first_out);
  }

  if (!o.second_out.empty()) {
    const LclqConfig cfg = lclq_config(o.lclq_h, o.cutoff, o.no_truncation, false);
    cfg.validate();
    const GlobalClqTable table = [&] {
      try {
        // Anchor/neighbor universe for the table follows --fit-on.
        return o.fit_on == "all" ? global_clq(full, all_train_split(full), cfg)
                                 : global_clq(full, split, cfg);
      } catch (const std::invalid_argument& e) {
        throw DataError(e.what(), o.dataset);
      }
    }();
    std::optional<SpatialIndex> index;
    if (cfg.truncation) index.emplace(fit, cfg.cutoff_radius());
    std::vector<std::optional<ProbVector>> rows(targets.size());
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::int64_t i = 0; i < n_targets; ++i)
      rows[i] = second_order_probs(fit, table, positions[i], cfg, index ? &*index : nullptr);
    ProbTable out(ProbSource::second_order, fit.num_categories());
    for (std::size_t i = 0; i < targets.size(); ++i) out.insert(targets[i], std::move(*rows[i]));
    atomic_write_file(o.second_out, write_prob_table_csv(out));
    m.add("param.lclq_h", o.lclq_h);
    m.add("output.second", o.second_out);
  }

  const std::string primary = o.first_out.empty() ? o.second_out : o.first_out;
  m.write(manifest_path(o.manifest, primary));
  std::printf("locational probabilities for %zu targets written\n", targets.size());
}

void run_fuse_fit(const FuseFitOpts& o) {
  const ProbTable visual = load_prob_table(o.visual, ProbSource::visual);
  const ProbTable first = load_prob_table(o.first, ProbSource::first_order);
  const ProbTable second = load_prob_table(o.second, ProbSource::second_order);
  const PointDataset ds = load_dataset(o.dataset);
  const SplitAssignment split = load_split(o.split);

  const std::vector<std::int64_t> ids = subset_ids(ds, &split, o.subset);
  LabelMap truth;
  for (std::int64_t id : ids) {
    const auto pos = ds.position_of(id);
    if (!pos) throw DataError("split id not in dataset: " + std::to_string(id), o.split);
    truth[id] = ds.record(*pos).category;
  }

  FitOptions options;
  options.step = o.step;
  options.allow_first = !o.drop_first;
  options.allow_second = !o.drop_second;
  const FitResult result = [&] {
    try {
      return fit_weights(visual, first, second, truth, ids, options);
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), o.visual);
    }
  }();

  atomic_write_file(o.out, weights_line(result.weights));
  if (!o.report_out.empty()) atomic_write_file(o.report_out, render_fit_report(result));

  Manifest m("fuse-fit");
  m.add("input.visual", o.visual);
  m.add("input.first", o.first);
  m.add("input.second", o.second);
  m.add("input.dataset", o.dataset);
  m.add("input.split", o.split);
  m.add("param.subset", o.subset);
  m.add("param.step", o.step);
  m.add_bool("param.drop_first", o.drop_first);
  m.add_bool("param.drop_second", o.drop_second);
  m.add("output.weights", o.out);
  if (!o.report_out.empty()) m.add("output.report", o.report_out);
  m.write(manifest_path(o.manifest, o.out));

  std::printf("%s", render_fit_report(result).c_str());
}

void run_evaluate(const EvaluateOpts& o) {
  const PointDataset ds = load_dataset(o.dataset);
  std::optional<SplitAssignment> split;
  if (!o.split.empty()) split = load_split(o.split);
  const std::vector<std::int64_t> ids = subset_ids(ds, split ? &*split : nullptr, o.subset);

  LabelMap truth;
  for (std::int64_t id : ids) {
    const auto pos = ds.position_of(id);
    if (!pos) throw DataError("id not in dataset: " + std::to_string(id), o.dataset);
    truth[id] = ds.record(*pos).category;
  }

  LabelMap preds;
  Manifest m("evaluate");
  m.add("input.dataset", o.dataset);
  if (!o.split.empty()) m.add("input.split", o.split);
  m.add("param.subset", o.subset);
  if (!o.probs.empty()) {
    const ProbTable table = load_prob_table(o.probs, ProbSource::fused);
    for (std::int64_t id : ids) {
      if (!table.has(id)) throw DataError("id missing from table: " + std::to_string(id), o.probs);
      preds[id] = predict(table.at(id));
    }
    m.add("input.probs", o.probs);
  } else {
    const ProbTable visual = load_prob_table(o.visual, ProbSource::visual);
    const ProbTable first = load_prob_table(o.first, ProbSource::first_order);
    const ProbTable second = load_prob_table(o.second, ProbSource::second_order);
    const FusionWeights w = parse_weights_file(o.weights);
    for (std::int64_t id : ids) {
      if (!visual.has(id) || !first.has(id) || !second.has(id))
        throw DataError("id missing from a probability table: " + std::to_string(id), o.visual);
      preds[id] = predict(fuse(w, visual.at(id), first.at(id), second.at(id)));
    }
    m.add("input.visual", o.visual);
    m.add("input.first", o.first);
    m.add("input.second", o.second);
    m.add("input.weights", o.weights);
  }

  const EvalReport report = [&] {
    try {
      return evaluate(preds, truth, ds.num_categories());
    } catch (const std::invalid_argument& e) {
      throw DataError(e.what(), o.dataset);
    }
  }();
  const std::string text = render_eval_report(report, ds.category_names());
  if (!o.report_out.empty()) atomic_write_file(o.report_out, text);
  if (!o.csv_out.empty())
    atomic_write_file(o.csv_out, eval_report_csv(report, ds.category_names()));

  if (!o.report_out.empty() || !o.csv_out.empty() || !o.manifest.empty()) {
    if (!o.report_out.empty()) m.add("output.report", o.report_out);
    if (!o.csv_out.empty()) m.add("output.csv", o.csv_out);
    const std::string primary = !o.report_out.empty() ? o.report_out
                                : !o.csv_out.empty()  ? o.csv_out
                                                      : o.manifest;
    m.write(manifest_path(o.manifest, primary));
  }
  std::printf("%s", text.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial point pattern statistics toolkit", "sppa"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // keep -h free for bandwidths
  app.set_version_flag("--version", std::string("sppa ") + kVersion);
  app.footer("The SPPA_THREADS environment variable caps internal parallelism (0 = auto).");
  // Later occurrences win, so config-file values can be overridden on the
  // command line (expand_config_args inserts them first).
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  IngestOpts ingest;
  auto* c_ingest = app.add_subcommand("ingest", "validate a dataset CSV and write it back in canonical form");
  c_ingest->add_option("--config", "key=value file; command-line flags override it");
  c_ingest->add_option("--in", ingest.in, "input dataset CSV")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "canonical dataset CSV")->required();
  c_ingest->add_option("--manifest", ingest.manifest, "manifest path (default <out>.manifest)");

  SplitOpts split;
  auto* c_split = app.add_subcommand("split", "stratified train/val/test split");
  c_split->add_option("--config", "key=value file; command-line flags override it");
  c_split->add_option("--dataset", split.dataset)->required()->check(CLI::ExistingFile);
  c_split->add_option("--out", split.out, "split CSV")->required();
  c_split->add_option("--fractions", split.fractions, "train,val,test fractions");
  c_split->add_option("--seed", split.seed, "shuffle seed");
  c_split->add_option("--manifest", split.manifest);

  SynthOpts synth;
  auto* c_synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
  c_synth->add_option("--config", "key=value file; command-line flags override it");
  c_synth->add_option("--preset", synth.preset, "csr (uniform, random labels) or clustered")
      ->required()
      ->check(CLI::IsMember({"csr", "clustered"}));
  c_synth->add_option("--n", synth.n, "target point count")->required()->check(CLI::PositiveNumber);
  c_synth->add_option("--classes", synth.classes, "category count (default 3 csr / 6 clustered)");
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--out", synth.out, "dataset CSV")->required();
  c_synth->add_option("--visual-out", synth.visual_out, "also emit a noisy visual probability table");
  c_synth->add_option("--visual-accuracy", synth.visual_accuracy)->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--visual-gamma", synth.visual_gamma)->check(CLI::Range(0.0, 1.0));
  c_synth->add_option("--visual-seed", synth.visual_seed);
  c_synth->add_option("--manifest", synth.manifest);

  IntensityOpts intensity;
  auto* c_intensity = app.add_subcommand("intensity", "per-category density raster");
  c_intensity->add_option("--config", "key=value file; command-line flags override it");
  c_intensity->add_option("--dataset", intensity.dataset)->required()->check(CLI::ExistingFile);
  c_intensity->add_option("--split", intensity.split)->check(CLI::ExistingFile);
  c_intensity->add_option("--fit-on", intensity.fit_on)
      ->check(CLI::IsMember({"all", "train", "val", "test"}));
  c_intensity->add_option("--category", intensity.category)->required();
  c_intensity->add_option("--h", intensity.h, "bandwidth (0.05 x bbox diagonal is a fair default)")->required()->check(CLI::PositiveNumber);
  c_intensity->add_option("--cutoff", intensity.cutoff, "truncation radius in bandwidths");
  c_intensity->add_flag("--no-truncation", intensity.no_truncation);
  c_intensity->add_option("--grid", intensity.grid, "x0,y0,cell,width,height")->required();
  c_intensity->add_option("--out", intensity.out, "raster text file")->required();
  c_intensity->add_option("--manifest", intensity.manifest);

  HeatmapOpts heatmap;
  auto* c_heatmap = app.add_subcommand("heatmap", "raster to binary PGM image");
  c_heatmap->add_option("--config", "key=value file; command-line flags override it");
  c_heatmap->add_option("--raster", heatmap.raster)->required()->check(CLI::ExistingFile);
  c_heatmap->add_option("--out", heatmap.out, "PGM path")->required();
  c_heatmap->add_option("--mode", heatmap.mode)->check(CLI::IsMember({"pgm8", "pgm16"}));
  c_heatmap->add_option("--manifest", heatmap.manifest);

  LclqOpts lclq;
  auto* c_lclq = app.add_subcommand("lclq", "local colocation quotient vectors per point");
  c_lclq->add_option("--config", "key=value file; command-line flags override it");
  c_lclq->add_option("--dataset", lclq.dataset)->required()->check(CLI::ExistingFile);
  c_lclq->add_option("--split", lclq.split)->check(CLI::ExistingFile);
  c_lclq->add_option("--points-from", lclq.points_from)
      ->check(CLI::IsMember({"all", "train", "val", "test"}));
  c_lclq->add_option("--h", lclq.h, "bandwidth (0.05 x bbox diagonal is a fair default)")->required()->check(CLI::PositiveNumber);
  c_lclq->add_option("--cutoff", lclq.cutoff);
  c_lclq->add_flag("--no-truncation", lclq.no_truncation);
  c_lclq->add_flag("--self-correction", lclq.self_correction);
  c_lclq->add_option("--out", lclq.out, "vector CSV")->required();
  c_lclq->add_option("--manifest", lclq.manifest);

  GlobalClqOpts globalclq;
  auto* c_globalclq = app.add_subcommand("globalclq", "per-category mean colocation signatures");
  c_globalclq->add_option("--config", "key=value file; command-line flags override it");
  c_globalclq->add_option("--dataset", globalclq.dataset)->required()->check(CLI::ExistingFile);
  c_globalclq->add_option("--split", globalclq.split)->required()->check(CLI::ExistingFile);
  c_globalclq->add_option("--h", globalclq.h)->required()->check(CLI::PositiveNumber);
  c_globalclq->add_option("--cutoff", globalclq.cutoff);
  c_globalclq->add_flag("--no-truncation", globalclq.no_truncation);
  c_globalclq->add_flag("--self-correction", globalclq.self_correction);
  c_globalclq->add_option("--out", globalclq.out)->required();
  c_globalclq->add_option("--manifest", globalclq.manifest);

  LocProbsOpts locprobs;
  auto* c_locprobs = app.add_subcommand("locprobs", "first/second-order probability tables at target points");
  c_locprobs->add_option("--config", "key=value file; command-line flags override it");
  c_locprobs->add_option("--dataset", locprobs.dataset)->required()->check(CLI::ExistingFile);
  c_locprobs->add_option("--split", locprobs.split)->required()->check(CLI::ExistingFile);
  c_locprobs->add_option("--fit-on", locprobs.fit_on)->check(CLI::IsMember({"train", "all"}));
  c_locprobs->add_option("--targets", locprobs.targets, "comma list of subsets (train,val,test,all)");
  c_locprobs->add_option("--kde-h", locprobs.kde_h)->check(CLI::PositiveNumber);
  c_locprobs->add_option("--lclq-h", locprobs.lclq_h)->check(CLI::PositiveNumber);
  c_locprobs->add_option("--cutoff", locprobs.cutoff);
  c_locprobs->add_flag("--no-truncation", locprobs.no_truncation);
  c_locprobs->add_option("--first-out", locprobs.first_out);
  c_locprobs->add_option("--second-out", locprobs.second_out);
  c_locprobs->add_option("--manifest", locprobs.manifest);

  FuseFitOpts fusefit;
  auto* c_fusefit = app.add_subcommand("fuse-fit", "fit convex fusion weights on a split");
  c_fusefit->add_option("--config", "key=value file; command-line flags override it");
  c_fusefit->add_option("--visual", fusefit.visual)->required()->check(CLI::ExistingFile);
  c_fusefit->add_option("--first", fusefit.first)->required()->check(CLI::ExistingFile);
  c_fusefit->add_option("--second", fusefit.second)->required()->check(CLI::ExistingFile);
  c_fusefit->add_option("--dataset", fusefit.dataset)->required()->check(CLI::ExistingFile);
  c_fusefit->add_option("--split", fusefit.split)->required()->check(CLI::ExistingFile);
  c_fusefit->add_option("--subset", fusefit.subset)
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  c_fusefit->add_option("--step", fusefit.step)->check(CLI::Range(1e-6, 0.5));
  c_fusefit->add_flag("--drop-first", fusefit.drop_first, "search with zero first-order weight");
  c_fusefit->add_flag("--drop-second", fusefit.drop_second, "search with zero second-order weight");
  c_fusefit->add_option("--out", fusefit.out, "weights file")->required();
  c_fusefit->add_option("--report-out", fusefit.report_out);
  c_fusefit->add_option("--manifest", fusefit.manifest);

  EvaluateOpts evaluate_opts;
  auto* c_evaluate = app.add_subcommand("evaluate", "accuracy report for a probability table");
  c_evaluate->add_option("--config", "key=value file; command-line flags override it");
  auto* probs_opt = c_evaluate->add_option("--probs", evaluate_opts.probs, "single probability table");
  c_evaluate->add_option("--visual", evaluate_opts.visual)->excludes(probs_opt);
  c_evaluate->add_option("--first", evaluate_opts.first)->excludes(probs_opt);
  c_evaluate->add_option("--second", evaluate_opts.second)->excludes(probs_opt);
  c_evaluate->add_option("--weights", evaluate_opts.weights, "weights file for on-the-fly fusion")
      ->excludes(probs_opt);
  c_evaluate->add_option("--dataset", evaluate_opts.dataset)->required()->check(CLI::ExistingFile);
  c_evaluate->add_option("--split", evaluate_opts.split)->check(CLI::ExistingFile);
  c_evaluate->add_option("--subset", evaluate_opts.subset)
      ->check(CLI::IsMember({"train", "val", "test", "all"}));
  c_evaluate->add_option("--report-out", evaluate_opts.report_out);
  c_evaluate->add_option("--csv-out", evaluate_opts.csv_out);
  c_evaluate->add_option("--manifest", evaluate_opts.manifest);

  c_ingest->callback([&] { run_ingest(ingest); });
  c_split->callback([&] { run_split(split); });
  c_synth->callback([&] { run_synth(synth); });
  c_intensity->callback([&] { run_intensity(intensity); });
  c_heatmap->callback([&] { run_heatmap(heatmap); });
  c_lclq->callback([&] { run_lclq(lclq); });
  c_globalclq->callback([&] { run_globalclq(globalclq); });
  c_locprobs->callback([&] { run_locprobs(locprobs); });
  c_fusefit->callback([&] { run_fuse_fit(fusefit); });
  c_evaluate->callback([&] {
    if (evaluate_opts.probs.empty() &&
        (evaluate_opts.visual.empty() || evaluate_opts.first.empty() ||
         evaluate_opts.second.empty() || evaluate_opts.weights.empty()))
      throw CLI::RequiredError("--probs or (--visual --first --second --weights)");
    run_evaluate(evaluate_opts);
  });

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sppa: %s\n", e.what());
    return 1;
  }
  std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args

  try {
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "sppa: data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sppa: data error: %s\n", e.what());
    return 2;
  }
  return 0;
}
