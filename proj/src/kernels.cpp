#include "wildknot/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wildknot::kernels {

void BallSoA::push(const Vec4& c, double radius) {
  x0.push_back(c[0]);
  x1.push_back(c[1]);
  x2.push_back(c[2]);
  x3.push_back(c[3]);
  r.push_back(radius);
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// ------------------------------------------------------------------- grid

BallGrid::BallGrid(const BallSoA& b, double cell) : cell_(cell) {
  if (!(cell > 0)) throw std::invalid_argument("BallGrid: cell must be > 0");
  const std::vector<double>* cols[4] = {&b.x0, &b.x1, &b.x2, &b.x3};
  std::array<std::int64_t, 4> hi{};
  for (int d = 0; d < 4; ++d) {
    lo_[d] = 0;
    hi[d] = 0;
    if (b.size() == 0) continue;
    auto [mn, mx] = std::minmax_element(cols[d]->begin(), cols[d]->end());
    lo_[d] = static_cast<std::int64_t>(std::floor(*mn / cell)) - 1;
    hi[d] = static_cast<std::int64_t>(std::floor(*mx / cell)) + 1;
  }
  for (int d = 0; d < 4; ++d) dims_[d] = hi[d] - lo_[d] + 1;

  std::vector<std::pair<std::int64_t, int>> keyed(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::array<std::int64_t, 4> c{};
    for (int d = 0; d < 4; ++d)
      c[d] = static_cast<std::int64_t>(std::floor((*cols[d])[i] / cell));
    keyed[i] = {key(c), static_cast<int>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  keys_.clear();
  offsets_.clear();
  items_.resize(keyed.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) {
      keys_.push_back(keyed[i].first);
      offsets_.push_back(static_cast<int>(i));
    }
    items_[i] = keyed[i].second;
  }
  offsets_.push_back(static_cast<int>(keyed.size()));
}

std::int64_t BallGrid::key(const std::array<std::int64_t, 4>& c) const {
  std::int64_t k = 0;
  for (int d = 0; d < 4; ++d) k = k * dims_[d] + (c[d] - lo_[d]);
  return k;
}

std::vector<int> BallGrid::near(const Vec4& p, double reach) const {
  std::vector<int> out;
  if (keys_.empty()) return out;
  std::array<std::int64_t, 4> a{}, z{};
  for (int d = 0; d < 4; ++d) {
    a[d] = std::max(lo_[d],
                    static_cast<std::int64_t>(std::floor((p[d] - reach) / cell_)));
    z[d] = std::min(lo_[d] + dims_[d] - 1,
                    static_cast<std::int64_t>(std::floor((p[d] + reach) / cell_)));
    if (a[d] > z[d]) return out;
  }
  std::array<std::int64_t, 4> c{};
  for (c[0] = a[0]; c[0] <= z[0]; ++c[0])
    for (c[1] = a[1]; c[1] <= z[1]; ++c[1])
      for (c[2] = a[2]; c[2] <= z[2]; ++c[2])
        for (c[3] = a[3]; c[3] <= z[3]; ++c[3]) {
          const auto it = std::lower_bound(keys_.begin(), keys_.end(), key(c));
          if (it == keys_.end() || *it != key(c)) continue;
          const auto s = static_cast<std::size_t>(it - keys_.begin());
          out.insert(out.end(), items_.begin() + offsets_[s],
                     items_.begin() + offsets_[s + 1]);
        }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------- touching pairs

namespace {

double max_radius(const BallSoA& b) {
  return b.size() ? *std::max_element(b.r.begin(), b.r.end()) : 1.0;
}

double dist2(const BallSoA& b, std::size_t i, std::size_t j) {
  const double d0 = b.x0[i] - b.x0[j], d1 = b.x1[i] - b.x1[j],
               d2 = b.x2[i] - b.x2[j], d3 = b.x3[i] - b.x3[j];
  return d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
}

void pairs_for(const BallSoA& b, const BallGrid& g, double rmax, double slack,
               std::size_t i, std::vector<std::pair<int, int>>& out) {
  for (int j : g.near(b.center(i), b.r[i] + rmax + slack)) {
    if (static_cast<std::size_t>(j) <= i) continue;
    const double s = b.r[i] + b.r[j] + slack;
    if (dist2(b, i, j) <= s * s) out.emplace_back(static_cast<int>(i), j);
  }
}

}  // namespace

std::vector<std::pair<int, int>> touching_pairs_serial(const BallSoA& b,
                                                       double slack) {
  const double rmax = max_radius(b);
  const BallGrid g(b, 2 * rmax + slack);
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < b.size(); ++i) pairs_for(b, g, rmax, slack, i, out);
  return out;
}

std::vector<std::pair<int, int>> touching_pairs_omp(const BallSoA& b,
                                                    double slack) {
  const double rmax = max_radius(b);
  const BallGrid g(b, 2 * rmax + slack);
  const auto n = static_cast<std::int64_t>(b.size());
  std::vector<std::vector<std::pair<int, int>>> per(b.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t i = 0; i < n; ++i)
    pairs_for(b, g, rmax, slack, static_cast<std::size_t>(i), per[i]);
  std::vector<std::pair<int, int>> out;
  for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------- coverage

namespace {

std::size_t patch_misses(const BallSoA& b, const Patch& p, std::size_t n,
                         int skip) {
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t miss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = u(rng), t = u(rng);
    const Vec4 x = p.origin + s * p.du + t * p.dv;
    bool hit = false;
    for (int j : p.candidates) {
      if (j == skip) continue;
      const double d0 = x[0] - b.x0[j], d1 = x[1] - b.x1[j],
                   d2 = x[2] - b.x2[j], d3 = x[3] - b.x3[j];
      if (d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3 < b.r[j] * b.r[j]) {
        hit = true;
        break;
      }
    }
    if (!hit) ++miss;
  }
  return miss;
}

}  // namespace

std::vector<std::size_t> coverage_misses_serial(const BallSoA& b,
                                                const std::vector<Patch>& p,
                                                std::size_t n, int skip) {
  std::vector<std::size_t> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = patch_misses(b, p[i], n, skip);
  return out;
}

std::vector<std::size_t> coverage_misses_omp(const BallSoA& b,
                                             const std::vector<Patch>& p,
                                             std::size_t n, int skip) {
  std::vector<std::size_t> out(p.size());
  const auto m = static_cast<std::int64_t>(p.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t i = 0; i < m; ++i) out[i] = patch_misses(b, p[i], n, skip);
  return out;
}

// ------------------------------------------------------ inversion escapes

namespace {

std::size_t escapes_for(const BallSoA& b, const Vec4& x) {
  std::size_t bad = 0;
  const std::size_t n = b.size();
  const double* c0 = b.x0.data();
  const double* c1 = b.x1.data();
  const double* c2 = b.x2.data();
  const double* c3 = b.x3.data();
  const double* r = b.r.data();
#pragma omp simd reduction(+ : bad)
  for (std::size_t i = 0; i < n; ++i) {
    const double d0 = x[0] - c0[i], d1 = x[1] - c1[i], d2 = x[2] - c2[i],
                 d3 = x[3] - c3[i];
    const double q = d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3;
    const double s = r[i] * r[i] / q;
    const double e0 = s * d0, e1 = s * d1, e2 = s * d2, e3 = s * d3;
    const double img = e0 * e0 + e1 * e1 + e2 * e2 + e3 * e3;
    bad += (img < r[i] * r[i]) ? 0 : 1;
  }
  return bad;
}

}  // namespace

std::size_t inversion_escapes_serial(const BallSoA& b,
                                     const std::vector<Vec4>& pts) {
  std::size_t bad = 0;
  for (const auto& x : pts) bad += escapes_for(b, x);
  return bad;
}

std::size_t inversion_escapes_omp(const BallSoA& b,
                                  const std::vector<Vec4>& pts) {
  std::size_t bad = 0;
  const auto m = static_cast<std::int64_t>(pts.size());
#pragma omp parallel for reduction(+ : bad) schedule(static)
  for (std::int64_t i = 0; i < m; ++i) bad += escapes_for(b, pts[i]);
  return bad;
}

}  // namespace wildknot::kernels
