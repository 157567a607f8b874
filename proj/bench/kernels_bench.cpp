// Serial reference versus OpenMP version of each kernel, on the ball cover
// of the spun trefoil.  Each OpenMP benchmark first checks that its result
// equals the serial one.

#include "wildknot/construction.hpp"
#include "wildknot/kernels.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace {

using namespace wildknot;
namespace k = wildknot::kernels;

struct Fixture {
  BallCover cover;
  k::BallSoA soa;
  std::vector<k::Patch> patches;
  std::vector<Vec4> outside;

  Fixture() : cover(build_cover(spun_trefoil_preset(), 0)) {
    double rmax = 0;
    for (const auto& b : cover.balls) {
      soa.push(b.center, b.radius);
      rmax = std::max(rmax, b.radius);
    }
    const k::BallGrid grid(soa, 2 * rmax);
    const auto& s = cover.surface;
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
      k::Patch p;
      p.origin = lattice_point(cover, s.faces[f].corner);
      p.du = Vec4::Zero();
      p.dv = Vec4::Zero();
      p.du[s.faces[f].a] = cover.spacing;
      p.dv[s.faces[f].b] = cover.spacing;
      p.candidates = grid.near(p.origin + 0.5 * (p.du + p.dv), cover.spacing + rmax);
      p.seed = k::mix_seed(f);
      patches.push_back(std::move(p));
    }
    // Points outside every ball, for the inversion kernel.
    std::mt19937_64 rng(7);
    Vec4 lo = soa.center(0), hi = lo;
    for (std::size_t i = 0; i < soa.size(); ++i) {
      lo = lo.cwiseMin(soa.center(i));
      hi = hi.cwiseMax(soa.center(i));
    }
    std::uniform_real_distribution<double> u(0, 1);
    while (outside.size() < 64) {
      Vec4 p;
      for (int d = 0; d < 4; ++d) p[d] = lo[d] + (hi[d] - lo[d] + 2) * u(rng) - 1;
      bool free = true;
      for (int i : grid.near(p, rmax))
        free = free && (p - soa.center(i)).norm() > soa.r[i];
      if (free) outside.push_back(p);
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_TouchingPairsSerial(benchmark::State& st) {
  const auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(k::touching_pairs_serial(f.soa, 1e-7));
  st.counters["balls"] = static_cast<double>(f.soa.size());
}

void BM_TouchingPairsOmp(benchmark::State& st) {
  const auto& f = fixture();
  if (k::touching_pairs_omp(f.soa, 1e-7) != k::touching_pairs_serial(f.soa, 1e-7)) {
    st.SkipWithError("OpenMP result differs from serial");
    return;
  }
  for (auto _ : st) benchmark::DoNotOptimize(k::touching_pairs_omp(f.soa, 1e-7));
  st.counters["balls"] = static_cast<double>(f.soa.size());
}

void BM_CoverageSerial(benchmark::State& st) {
  const auto& f = fixture();
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(k::coverage_misses_serial(f.soa, f.patches, n, -1));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n * f.patches.size()));
}

void BM_CoverageOmp(benchmark::State& st) {
  const auto& f = fixture();
  const auto n = static_cast<std::size_t>(st.range(0));
  if (k::coverage_misses_omp(f.soa, f.patches, n, -1) !=
      k::coverage_misses_serial(f.soa, f.patches, n, -1)) {
    st.SkipWithError("OpenMP result differs from serial");
    return;
  }
  for (auto _ : st) benchmark::DoNotOptimize(k::coverage_misses_omp(f.soa, f.patches, n, -1));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * n * f.patches.size()));
}

void BM_InversionSerial(benchmark::State& st) {
  const auto& f = fixture();
  for (auto _ : st) benchmark::DoNotOptimize(k::inversion_escapes_serial(f.soa, f.outside));
  st.SetItemsProcessed(
      static_cast<std::int64_t>(st.iterations() * f.outside.size() * f.soa.size()));
}

void BM_InversionOmp(benchmark::State& st) {
  const auto& f = fixture();
  if (k::inversion_escapes_omp(f.soa, f.outside) !=
      k::inversion_escapes_serial(f.soa, f.outside)) {
    st.SkipWithError("OpenMP result differs from serial");
    return;
  }
  for (auto _ : st) benchmark::DoNotOptimize(k::inversion_escapes_omp(f.soa, f.outside));
  st.SetItemsProcessed(
      static_cast<std::int64_t>(st.iterations() * f.outside.size() * f.soa.size()));
}

}  // namespace

BENCHMARK(BM_TouchingPairsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TouchingPairsOmp)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CoverageSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageOmp)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_InversionSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_InversionOmp)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
