// Benchmark of the accelerated kernels against the serial brute-force
// reference. Checks agreement while it measures: the indexed OpenMP kernels
// must match a single-thread run of themselves bit for bit, and match the
// reference within tolerance once truncation is off.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "sppa/kde.hpp"
#include "sppa/lclq.hpp"
#include "sppa/parallel.hpp"
#include "sppa/reference.hpp"
#include "sppa/spatial_index.hpp"
#include "sppa/split.hpp"
#include "sppa/synth.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sppa;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Timing {
  double seconds = 0.0;
};

template <typename F>
Timing timed(F&& fn) {
  const double t0 = now_seconds();
  fn();
  return {now_seconds() - t0};
}

bool close(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

int g_failures = 0;

void check(bool ok, const char* what) {
  if (!ok) {
    std::printf("FAIL %s\n", what);
    ++g_failures;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n = 20000;
  int grid_dim = 96;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--n") && i + 1 < argc) n = std::atoll(argv[++i]);
    else if (!std::strcmp(argv[i], "--grid") && i + 1 < argc) grid_dim = std::atoi(argv[++i]);
    else {
      std::printf("usage: sppa_bench [--n points] [--grid dim]\n");
      return 1;
    }
  }

  BBox unit;
  unit.expand({0.0, 0.0});
  unit.expand({1.0, 1.0});
  PointDataset ds(uniform_labeled_points(n, 4, unit, 20240601), {"a", "b", "c", "d"});
  std::printf("dataset: %lld points, 4 categories, %d threads available\n",
              static_cast<long long>(n), max_threads());

  const double h = 0.03;
  KdeConfig kde_cfg;
  kde_cfg.bandwidth = h;
  LclqConfig lclq_cfg;
  lclq_cfg.bandwidth = h;
  const SpatialIndex index(ds, kde_cfg.cutoff_radius());

  GridSpec grid{0.0, 0.0, 1.0 / grid_dim, grid_dim, grid_dim};

  // KDE raster: serial reference vs indexed OpenMP kernel.
  Raster ref_raster, omp_raster;
  const Timing t_ref = timed([&] { ref_raster = ref::intensity_raster(ds, 0, grid, h); });
  const Timing t_omp = timed([&] { omp_raster = intensity_raster(ds, 0, grid, kde_cfg, &index); });
  std::printf("kde raster %dx%d   reference %8.3fs   kernel %8.3fs   speedup %5.1fx\n", grid_dim,
              grid_dim, t_ref.seconds, t_omp.seconds, t_ref.seconds / t_omp.seconds);

  // Truncation keeps the kernel within ~1e-4 of the untruncated reference.
  bool raster_ok = true;
  for (std::size_t i = 0; i < omp_raster.values.size(); ++i)
    raster_ok = raster_ok && close(omp_raster.values[i], ref_raster.values[i], 1e-3);
  check(raster_ok, "kde raster within tolerance of reference");

  KdeConfig exact_cfg = kde_cfg;
  exact_cfg.truncation = false;
  Raster exact_raster;
  const Timing t_exact = timed([&] { exact_raster = intensity_raster(ds, 0, grid, exact_cfg); });
  bool exact_ok = true;
  for (std::size_t i = 0; i < exact_raster.values.size(); ++i)
    exact_ok = exact_ok && close(exact_raster.values[i], ref_raster.values[i], 1e-12);
  std::printf("kde raster untruncated kernel %8.3fs (1e-12 agreement: %s)\n", t_exact.seconds,
              exact_ok ? "yes" : "NO");
  check(exact_ok, "untruncated kde matches reference to 1e-12");

  // Batch LCLQ vectors over every point.
  std::vector<Anchor> anchors;
  anchors.reserve(ds.size());
  for (std::uint32_t pos : ds.positions_by_id()) anchors.push_back(Anchor::point(ds.record(pos).id));

  std::vector<LclqVector> batch;
  const Timing t_batch =
      timed([&] { batch = lclq_vectors(ds, anchors, lclq_cfg, &index); });

  // Reference on a sample of anchors (the full double loop would dwarf the run).
  const std::size_t sample = std::min<std::size_t>(200, anchors.size());
  std::vector<std::vector<double>> ref_sample(sample);
  const Timing t_refl = timed([&] {
    for (std::size_t i = 0; i < sample; ++i)
      ref_sample[i] = ref::lclq_vector(ds, anchors[i], h);
  });
  const double ref_full_estimate = t_refl.seconds * static_cast<double>(anchors.size()) / sample;
  std::printf("lclq vectors (%zu anchors)   reference ~%7.2fs (extrapolated)   kernel %8.3fs\n",
              anchors.size(), ref_full_estimate, t_batch.seconds);

  bool lclq_ok = true;
  for (std::size_t i = 0; i < sample; ++i)
    for (std::size_t c = 0; c < ref_sample[i].size(); ++c)
      lclq_ok = lclq_ok && close(batch[i].values[c], ref_sample[i][c], 1e-3);
  check(lclq_ok, "truncated lclq within tolerance of reference");

  LclqConfig exact_lclq = lclq_cfg;
  exact_lclq.truncation = false;
  bool lclq_exact_ok = true;
  for (std::size_t i = 0; i < sample; ++i) {
    const LclqVector v = lclq_vector(ds, anchors[i], exact_lclq);
    for (std::size_t c = 0; c < ref_sample[i].size(); ++c)
      lclq_exact_ok = lclq_exact_ok && close(v.values[c], ref_sample[i][c], 1e-12);
  }
  check(lclq_exact_ok, "untruncated lclq matches reference to 1e-12");

#ifdef _OPENMP
  // Thread-count independence: one thread must reproduce the parallel run
  // bit for bit.
  omp_set_num_threads(1);
  Raster serial_raster;
  const Timing t_serial =
      timed([&] { serial_raster = intensity_raster(ds, 0, grid, kde_cfg, &index); });
  std::vector<LclqVector> serial_batch = lclq_vectors(ds, anchors, lclq_cfg, &index);
  bool bitwise = serial_raster.values == omp_raster.values;
  for (std::size_t i = 0; i < batch.size(); ++i)
    bitwise = bitwise && serial_batch[i].values == batch[i].values;
  std::printf("single-thread kernel raster %8.3fs; parallel run bit-identical: %s\n",
              t_serial.seconds, bitwise ? "yes" : "NO");
  check(bitwise, "parallel and single-thread kernels bit-identical");
#endif

  if (g_failures) {
    std::printf("%d check(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all checks passed\n");
  return 0;
}
