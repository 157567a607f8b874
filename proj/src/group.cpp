#include "wildknot/group.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace wildknot {

bool is_reduced(const Word& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == w[i - 1]) return false;
  return true;
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string format_word(const Word& w) {
  if (w.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

int ReflectionGroup::order(int i, int j) const {
  if (i == j) return 1;
  const auto& f = finite[i];
  auto it = std::lower_bound(f.begin(), f.end(), std::make_pair(j, 0));
  return (it != f.end() && it->first == j) ? it->second : 0;
}

ReflectionGroup assemble_group(const BallCover& cov) {
  ReflectionGroup g;
  const std::size_t n = cov.balls.size();
  g.spheres.reserve(n);
  g.reflections.reserve(n);
  g.host.reserve(n);
  for (const auto& b : cov.balls) {
    g.spheres.push_back(b.sphere);
    g.reflections.push_back(MobiusMap::reflection(b.sphere));
    g.host.push_back(b.host);
  }
  g.finite.assign(n, {});
  for (const auto& a : cov.adjacency) {
    const double c = -inversive_product(g.spheres[a.i], g.spheres[a.j]);
    int m = 0;
    if (std::abs(c) <= 1e-9) m = 2;
    else if (std::abs(c - 0.5) <= 1e-9) m = 3;
    if (m == 0 || m != a.m) {
      std::ostringstream os;
      os << "generators " << a.i << " and " << a.j << " meet with cos " << c
         << ", not at pi/2 or pi/3";
      throw std::runtime_error(os.str());
    }
    g.finite[a.i].emplace_back(a.j, m);
    g.finite[a.j].emplace_back(a.i, m);
  }
  for (auto& f : g.finite) std::sort(f.begin(), f.end());

  int hosts = 0;
  for (int h : g.host) hosts = std::max(hosts, h + 1);
  g.blocks.assign(hosts, {});
  for (std::size_t i = 0; i < n; ++i) g.blocks[g.host[i]].push_back(static_cast<int>(i));
  g.amalgams = cov.amalgam_rings;
  return g;
}

std::vector<int> face_patch(const BallCover& cov, int face) {
  if (face < 0 || static_cast<std::size_t>(face) >= cov.face_balls.size())
    throw std::out_of_range("face_patch: no such face");
  std::vector<int> out;
  for (int v : cov.surface.face_vertices[face]) out.push_back(cov.vertex_ball[v]);
  for (int b : cov.face_balls[face]) out.push_back(b);
  return out;
}

Frame fit_frame(const ReflectionGroup& g, const std::vector<int>& gens) {
  if (gens.empty()) return Frame{};
  Vec4 lo = g.spheres[gens[0]].center(), hi = lo;
  double r = 0;
  for (int i : gens) {
    lo = lo.cwiseMin(g.spheres[i].center());
    hi = hi.cwiseMax(g.spheres[i].center());
    r = std::max(r, g.spheres[i].radius());
  }
  return Frame{0.5 * (lo + hi), r};
}

MobiusMap word_map(const ReflectionGroup& g, const Word& w, const Frame& f) {
  MobiusMap m;
  for (int k : w) m = m * MobiusMap::reflection(f.to_local(g.spheres[k]));
  return m;
}

RelationReport coxeter_suite(const ReflectionGroup& g) {
  RelationReport rep;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& [j, m] : g.finite[i]) {
      if (static_cast<std::size_t>(j) <= i) continue;
      ++rep.pairs;
      const Frame f = fit_frame(g, {static_cast<int>(i), j});
      const Mat6 p = (MobiusMap::reflection(f.to_local(g.spheres[i])) *
                      MobiusMap::reflection(f.to_local(g.spheres[j])))
                         .matrix();
      Mat6 q = Mat6::Identity();
      for (int k = 1; k <= m; ++k) {
        q = q * p;
        const double d = max_abs(q - Mat6::Identity());
        if (k < m) {
          rep.min_lower_power = std::min(rep.min_lower_power, d);
        } else {
          rep.max_residual = std::max(rep.max_residual, d);
          if (d > 1e-8) {
            std::ostringstream os;
            os << "(R" << i << " R" << j << ")^" << m << " residual " << d;
            rep.failures.push_back(os.str());
          }
        }
      }
    }
  }
  return rep;
}

// ------------------------------------------------------------ element index

namespace {

// Matrices ordered by a generic linear functional; a range query on the key
// followed by an entrywise comparison finds equal matrices without the
// boundary effects of rounding to a grid.
class MatrixIndex {
 public:
  MatrixIndex() {
    double w = 0.61803398875;
    for (int k = 0; k < 36; ++k) {
      w = std::fmod(w * 7.3 + 0.314159, 1.0);
      weights_[k] = 0.5 + w;
      wsum_ += weights_[k];
    }
  }

  double key(const Mat6& m) const {
    double s = 0;
    for (int k = 0; k < 36; ++k) s += weights_[k] * m.data()[k];
    return s;
  }

  /// Index of a stored matrix equal to m within tol * max(1, ||m||), or -1.
  long find(const Mat6& m, const std::vector<Mat6>& store, double tol) const {
    const double t = tol * std::max(1.0, max_abs(m));
    const double k = key(m);
    auto lo = map_.lower_bound(k - wsum_ * t);
    auto hi = map_.upper_bound(k + wsum_ * t);
    for (auto it = lo; it != hi; ++it)
      if (max_abs(store[it->second] - m) <= t) return it->second;
    return -1;
  }

  void insert(const Mat6& m, long idx) { map_.emplace(key(m), idx); }

 private:
  double weights_[36];
  double wsum_ = 0;
  std::multimap<double, long> map_;
};

constexpr double kSameElement = 1e-7;

}  // namespace

Enumeration enumerate_words(const ReflectionGroup& g, std::vector<int> gens,
                            int L, std::size_t max_elements) {
  if (L < 0) throw std::invalid_argument("enumerate_words: L must be >= 0");
  if (gens.empty())
    for (std::size_t i = 0; i < g.size(); ++i) gens.push_back(static_cast<int>(i));
  std::sort(gens.begin(), gens.end());
  Enumeration e;
  e.gens = gens;
  e.frame = fit_frame(g, gens);
  std::vector<MobiusMap> refl;
  for (int k : gens) refl.push_back(MobiusMap::reflection(e.frame.to_local(g.spheres[k])));

  std::vector<Mat6> store{Mat6::Identity()};
  MatrixIndex index;
  index.insert(store[0], 0);
  e.elements.push_back({Word{}, MobiusMap()});
  e.words_generated = 1;
  std::size_t layer_begin = 0, layer_end = 1;
  for (int len = 1; len <= L && !e.truncated; ++len) {
    for (std::size_t p = layer_begin; p < layer_end && !e.truncated; ++p) {
      for (std::size_t k = 0; k < gens.size(); ++k) {
        const Word& pw = e.elements[p].word;
        if (!pw.empty() && pw.back() == gens[k]) continue;
        ++e.words_generated;
        const Mat6 m = e.elements[p].map.matrix() * refl[k].matrix();
        if (index.find(m, store, kSameElement) >= 0) {
          ++e.duplicates;
          continue;
        }
        if (e.elements.size() >= max_elements) {
          e.truncated = true;
          break;
        }
        Word w = pw;
        w.push_back(gens[k]);
        index.insert(m, static_cast<long>(store.size()));
        store.push_back(m);
        e.elements.push_back({std::move(w), MobiusMap(m)});
      }
    }
    layer_begin = layer_end;
    layer_end = e.elements.size();
  }
  return e;
}

// ------------------------------------------------------------------- Tits

TitsRepresentation::TitsRepresentation(const ReflectionGroup& g,
                                       std::vector<int> gens)
    : gens_(std::move(gens)) {
  const std::size_t n = gens_.size();
  c_.assign(n * n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const int m = g.order(gens_[a], gens_[b]);
      // c = -2 B with B = -cos(pi/m); B = -1 for m = infinity.
      c_[a * n + b] = m == 1 ? -2 : m == 2 ? 0 : m == 3 ? 1 : 2;
    }
}

TitsRepresentation::IMat TitsRepresentation::identity() const {
  const std::size_t n = rank();
  IMat m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1;
  return m;
}

TitsRepresentation::IMat TitsRepresentation::right_multiply(const IMat& m,
                                                            int k) const {
  // sigma_k differs from I only in row k: (sigma_k)_{kj} = delta_kj + c_kj.
  const std::size_t n = rank();
  IMat out = m;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t mik = m[i * n + k];
    if (mik == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::int64_t c = c_[k * n + j];
      if (c == 0) continue;
      std::int64_t prod, sum;
      if (__builtin_mul_overflow(mik, c, &prod) ||
          __builtin_add_overflow(out[i * n + j], prod, &sum))
        throw std::overflow_error("Tits representation entry overflow");
      out[i * n + j] = sum;
    }
  }
  return out;
}

TitsRepresentation::IMat TitsRepresentation::evaluate(const Word& w) const {
  IMat m = identity();
  for (int k : w) m = right_multiply(m, k);
  return m;
}

int TitsRepresentation::local(int global) const {
  auto it = std::find(gens_.begin(), gens_.end(), global);
  return it == gens_.end() ? -1 : static_cast<int>(it - gens_.begin());
}

namespace {

struct IMatHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (auto x : v) h = (h ^ static_cast<std::uint64_t>(x)) * 1099511628211ULL;
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

FaithfulnessReport faithfulness_scan(const ReflectionGroup& g,
                                     const std::vector<int>& gens_in, int L,
                                     std::size_t max_elements) {
  if (L < 1) throw std::invalid_argument("faithfulness_scan: L must be >= 1");
  std::vector<int> gens = gens_in;
  std::sort(gens.begin(), gens.end());
  FaithfulnessReport rep;
  rep.max_length = L;
  const TitsRepresentation tits(g, gens);
  const Frame frame = fit_frame(g, gens);
  std::vector<Mat6> refl;
  for (int k : gens)
    refl.push_back(MobiusMap::reflection(frame.to_local(g.spheres[k])).matrix());

  struct Node {
    Word local;  // local generator indices
    TitsRepresentation::IMat tits;
    std::size_t mob;  // index into store
  };
  std::vector<Mat6> store{Mat6::Identity()};
  std::vector<Word> store_word{Word{}};
  MatrixIndex index;
  index.insert(store[0], 0);

  // In a Coxeter group |ws| = |w| +- 1, so a word of length n can only
  // coincide with elements of length n or n - 2.
  using Layer = std::unordered_map<TitsRepresentation::IMat, std::size_t, IMatHash>;
  std::vector<Node> prev2, prev{{Word{}, tits.identity(), 0}};
  Layer prev2_set, prev_set;
  prev_set.emplace(tits.identity(), 0);
  std::size_t total = 1;
  for (int len = 1; len <= L && !rep.truncated; ++len) {
    std::vector<Node> cur;
    Layer cur_set;
    for (const Node& p : prev) {
      for (std::size_t k = 0; k < gens.size(); ++k) {
        if (!p.local.empty() && p.local.back() == static_cast<int>(k)) continue;
        ++rep.words;
        auto t = tits.right_multiply(p.tits, static_cast<int>(k));
        if (cur_set.count(t) || prev2_set.count(t)) continue;
        if (total >= max_elements) {
          rep.truncated = true;
          break;
        }
        ++total;
        Node n{p.local, std::move(t), store.size()};
        n.local.push_back(static_cast<int>(k));
        const Mat6 m = store[p.mob] * refl[k];
        Word global;
        for (int x : n.local) global.push_back(gens[x]);
        const double gap = max_abs(m - Mat6::Identity());
        if (gap < rep.min_gap) {
          rep.min_gap = gap;
          rep.closest = global;
        }
        const long hit = index.find(m, store, kSameElement);
        if (hit >= 0) {
          rep.violations.push_back("word " + format_word(global) +
                                   " equals " + format_word(store_word[hit]) +
                                   " in Mob(4) but not in the Coxeter group");
        }
        index.insert(m, static_cast<long>(store.size()));
        store.push_back(m);
        store_word.push_back(global);
        cur_set.emplace(n.tits, cur.size());
        cur.push_back(std::move(n));
      }
      if (rep.truncated) break;
    }
    prev2 = std::move(prev);
    prev2_set = std::move(prev_set);
    prev = std::move(cur);
    prev_set = std::move(cur_set);
  }
  rep.abstract_elements = total;
  return rep;
}

// ------------------------------------------------------------------ drift

namespace {

using Real = long double;
struct XMat {
  Real a[6][6];
};
using XVec = std::array<Real, 6>;

// e = M^T J M - J, symmetric.
void form_error(const XMat& m, Real e[6][6]) {
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) {
      Real s = 0;
      for (int k = 0; k < 5; ++k) s += m.a[k][i] * m.a[k][j];
      s -= m.a[5][i] * m.a[5][j];
      if (i == j) s -= (i == 5 ? -1 : 1);
      e[i][j] = e[j][i] = s;
    }
}

Real max_entry(const Real e[6][6]) {
  Real w = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = i; j < 6; ++j) w = std::max(w, std::abs(e[i][j]));
  return w;
}

// Polar of a metric sphere rounded once in extended precision.
XVec extended_polar(const InversiveSphere& s) {
  if (s.is_plane()) {
    XVec v{};
    for (int i = 0; i < 6; ++i) v[i] = s.polar()[i];
    return v;
  }
  const Vec4 c = s.center();
  const Real r = s.radius();
  Real k = -r * r;
  for (int i = 0; i < 4; ++i) k += static_cast<Real>(c[i]) * c[i];
  const Real sign = s.bounded_interior() ? 1 : -1;
  XVec v{};
  for (int i = 0; i < 4; ++i) v[i] = sign * c[i] / r;
  v[4] = sign * (k - 1) / (2 * r);
  v[5] = sign * (k + 1) / (2 * r);
  return v;
}

struct DriftWalker {
  std::vector<XVec> u;
  int L;
  DriftReport& rep;
  std::vector<XMat> stack;
  Word word;

  void visit(int depth) {
    const XMat& m = stack[depth];
    if (depth > 0) {
      ++rep.words;
      Real e[6][6];
      form_error(m, e);
      const double d = static_cast<double>(max_entry(e));
      double nm = 0;
      for (auto& row : m.a)
        for (Real x : row) nm = std::max(nm, static_cast<double>(std::abs(x)));
      if (d > rep.max_drift) {
        rep.max_drift = d;
        rep.worst = word;
      }
      rep.max_norm = std::max(rep.max_norm, nm);
      rep.max_relative = std::max(rep.max_relative, d / std::max(1.0, nm * nm));
    }
    if (depth == L) return;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (!word.empty() && word.back() == static_cast<int>(k)) continue;
      const XVec& v = u[k];
      XMat& n = stack[depth + 1];
      // M R_v = M - 2 (M v) (J v)^T
      Real mv[6];
      for (int i = 0; i < 6; ++i) {
        Real s = 0;
        for (int j = 0; j < 6; ++j) s += m.a[i][j] * v[j];
        mv[i] = 2 * s;
      }
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          n.a[i][j] = m.a[i][j] - mv[i] * (j == 5 ? -v[j] : v[j]);
      // Re-projection M - M J e / 2.
      Real e[6][6];
      form_error(n, e);
      const XMat c = n;
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          Real s = 0;
          for (int q = 0; q < 6; ++q) s += c.a[i][q] * (q == 5 ? -e[q][j] : e[q][j]);
          n.a[i][j] -= s / 2;
        }
      word.push_back(static_cast<int>(k));
      visit(depth + 1);
      word.pop_back();
    }
  }
};

}  // namespace

DriftReport drift_scan(const ReflectionGroup& g, const std::vector<int>& gens,
                       int L) {
  DriftReport rep;
  const Frame f = fit_frame(g, gens);
  XMat id{};
  for (int i = 0; i < 6; ++i) id.a[i][i] = 1;
  DriftWalker w{{}, L, rep, std::vector<XMat>(L + 1, id), {}};
  for (int k : gens) w.u.push_back(extended_polar(f.to_local(g.spheres[k])));
  w.visit(0);
  for (int& x : rep.worst) x = gens[x];
  return rep;
}

}  // namespace wildknot
