#pragma once

// Hot loops over large ball families.  Every kernel has a serial reference
// and an OpenMP version; both must return identical results.

#include "wildknot/inversive.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace wildknot::kernels {

/// Balls in structure-of-arrays layout.
struct BallSoA {
  std::vector<double> x0, x1, x2, x3, r;

  std::size_t size() const { return r.size(); }
  void push(const Vec4& c, double radius);
  Vec4 center(std::size_t i) const { return Vec4(x0[i], x1[i], x2[i], x3[i]); }
};

/// Uniform hash grid over ball centers.  Cell size should be at least the
/// largest ball diameter so overlap queries only visit the 3^4 neighborhood.
class BallGrid {
 public:
  BallGrid(const BallSoA& balls, double cell);

  /// Indices of balls whose center lies within the cells covering the box
  /// [p - reach, p + reach]; ascending order.
  std::vector<int> near(const Vec4& p, double reach) const;
  double cell() const { return cell_; }

 private:
  std::int64_t key(const std::array<std::int64_t, 4>& c) const;
  double cell_;
  std::array<std::int64_t, 4> lo_{}, dims_{};
  std::vector<std::int64_t> keys_;  // occupied cells, sorted
  std::vector<int> offsets_;        // run starts into items_
  std::vector<int> items_;
};

/// Pairs (i < j) whose closed balls meet: |ci - cj| <= ri + rj + slack.
/// Sorted lexicographically.
std::vector<std::pair<int, int>> touching_pairs_serial(const BallSoA& b,
                                                       double slack);
std::vector<std::pair<int, int>> touching_pairs_omp(const BallSoA& b,
                                                    double slack);

/// A parallelogram patch origin + s du + t dv, s,t in [0,1], with the balls
/// that can possibly cover it.
struct Patch {
  Vec4 origin, du, dv;
  std::vector<int> candidates;
  std::uint64_t seed = 0;
};

/// Per-patch count of uniformly sampled points not inside any open candidate
/// ball (ball `skip` ignored).  Samples come from a per-patch generator, so
/// results do not depend on the schedule.
std::vector<std::size_t> coverage_misses_serial(const BallSoA& b,
                                                const std::vector<Patch>& p,
                                                std::size_t n, int skip);
std::vector<std::size_t> coverage_misses_omp(const BallSoA& b,
                                             const std::vector<Patch>& p,
                                             std::size_t n, int skip);

/// For every point and every ball i, inverts the point in sphere i and
/// counts images that are not strictly inside ball i.  Points must lie
/// outside every ball.
std::size_t inversion_escapes_serial(const BallSoA& b,
                                     const std::vector<Vec4>& pts);
std::size_t inversion_escapes_omp(const BallSoA& b,
                                  const std::vector<Vec4>& pts);

/// splitmix64 step, used to derive independent per-item seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace wildknot::kernels
