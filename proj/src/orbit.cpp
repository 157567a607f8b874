#include "wildknot/group.hpp"
#include "wildknot/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace wildknot {

Word Orbit::word(std::size_t seq) const {
  Word w;
  for (int p = spheres.at(seq).parent; p >= 0; p = spheres[p].parent)
    w.push_back(spheres[p].base);
  std::reverse(w.begin(), w.end());
  return w;
}

InversiveSphere Orbit::sphere(std::size_t seq) const {
  return InversiveSphere::from_center_radius(spheres.at(seq).center,
                                             spheres[seq].radius);
}

std::size_t Orbit::generation_size(int k) const {
  if (k < 0 || k + 1 >= static_cast<int>(generation_start.size())) return 0;
  return generation_start[k + 1] - generation_start[k];
}

double Orbit::max_radius(int k) const {
  double r = 0;
  if (generation_size(k) == 0) return r;
  for (std::size_t i = generation_start[k]; i < generation_start[k + 1]; ++i)
    r = std::max(r, spheres[i].radius);
  return r;
}

namespace {

// Largest radius ratio of a sphere nested in another at inversive distance d.
double nest_ratio(double d) { return d - std::sqrt(std::max(0.0, d * d - 1.0)); }

double distance_for_ratio(double k) { return 0.5 * (k + 1.0 / k); }

struct Expander {
  const ReflectionGroup& g;
  const OrbitLimits& lim;
  kernels::BallSoA soa;
  std::unique_ptr<kernels::BallGrid> grid;
  double r_max = 0;

  explicit Expander(const ReflectionGroup& group, const OrbitLimits& l)
      : g(group), lim(l) {
    for (const auto& s : g.spheres) {
      soa.push(s.center(), s.radius());
      r_max = std::max(r_max, s.radius());
    }
    grid = std::make_unique<kernels::BallGrid>(soa, 2 * r_max);
  }

  // Generators within distance reach of generator i's center.
  std::vector<int> near(int i, double reach) const {
    const Vec4 c = g.spheres[i].center();
    const double cells = 2 * reach / grid->cell() + 1;
    if (cells * cells * cells * cells < static_cast<double>(soa.size()))
      return grid->near(c, reach);
    std::vector<int> out;
    for (std::size_t j = 0; j < soa.size(); ++j)
      if ((soa.center(j) - c).norm() <= reach) out.push_back(static_cast<int>(j));
    return out;
  }

  // Children g R_i (s_j) of the node with map word `w` (letters of g) and base
  // i, radius r_parent.
  std::vector<OrbitSphere> children(const Word& w, int i, double r_parent,
                                    int parent_seq, int gen) const {
    const double r_i = g.spheres[i].radius();
    const double k_floor = lim.radius_floor / r_parent;
    const std::size_t B = lim.branch_cap > 0 ? lim.branch_cap : 0;
    std::vector<OrbitSphere> out;
    double k = B > 0 ? std::max(0.1, k_floor) : k_floor;
    while (k < 1) {  // k >= 1: no child can reach the floor
      out.clear();
      const double dmax = distance_for_ratio(k);
      const double reach =
          std::sqrt(r_i * r_i + r_max * r_max + 2 * dmax * r_i * r_max);
      for (int j : near(i, reach)) {
        if (g.order(i, j) != 0) continue;
        const double d = -inversive_product(g.spheres[i], g.spheres[j]);
        if (d > dmax) continue;
        if (nest_ratio(d) * r_parent < lim.radius_floor) continue;
        InversiveSphere x = invert_sphere(g.spheres[i], g.spheres[j]);
        for (auto it = w.rbegin(); it != w.rend(); ++it)
          x = invert_sphere(g.spheres[*it], x);
        if (x.is_plane() || !x.bounded_interior())
          throw std::runtime_error("orbit: child sphere is not a bounded ball");
        if (x.radius() < lim.radius_floor) continue;
        out.push_back({x.center(), x.radius(), parent_seq, j, gen});
      }
      const double bound = k * r_parent;  // children not yet seen are smaller
      if (k <= k_floor || k < 1e-12) break;
      if (B > 0) {
        std::size_t big = 0;
        for (const auto& c : out) big += c.radius >= bound;
        if (big >= B) break;
      }
      k = std::max(k / 10, k_floor);
    }
    std::sort(out.begin(), out.end(), [](const OrbitSphere& a, const OrbitSphere& b) {
      return a.base < b.base;
    });
    if (B > 0 && out.size() > B) {
      std::vector<OrbitSphere> keep = out;
      std::stable_sort(keep.begin(), keep.end(),
                       [](const OrbitSphere& a, const OrbitSphere& b) {
                         return a.radius > b.radius;
                       });
      keep.resize(B);
      std::sort(keep.begin(), keep.end(), [](const OrbitSphere& a, const OrbitSphere& b) {
        return a.base < b.base;
      });
      out = std::move(keep);
    }
    return out;
  }
};

}  // namespace

Orbit orbit_spheres(const ReflectionGroup& g, const OrbitLimits& lim) {
  Orbit o;
  if (lim.branch_cap < 0 || !(lim.radius_floor >= 0))
    throw std::invalid_argument("orbit: negative branch cap or radius floor");
  if (lim.max_generation > 0 && lim.branch_cap == 0 && lim.radius_floor == 0)
    throw std::invalid_argument("orbit: need a radius floor or a branch cap");
  o.limits = lim;
  std::vector<int> roots = lim.roots;
  if (roots.empty())
    for (std::size_t i = 0; i < g.size(); ++i) roots.push_back(static_cast<int>(i));
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());

  o.generation_start.push_back(0);
  for (int i : roots)
    o.spheres.push_back({g.spheres.at(i).center(), g.spheres[i].radius(), -1, i, 0});
  o.generation_start.push_back(o.spheres.size());
  if (lim.max_generation <= 0) return o;

  const Expander ex(g, lim);
  for (int gen = 1; gen <= lim.max_generation; ++gen) {
    const std::size_t a = o.generation_start[gen - 1], b = o.generation_start[gen];
    const auto n = static_cast<long>(b - a);
    std::vector<std::vector<OrbitSphere>> kids(n);
    std::vector<Word> words(n);
    for (long t = 0; t < n; ++t) words[t] = o.word(a + t);
#pragma omp parallel for schedule(dynamic, 16) if (lim.parallel)
    for (long t = 0; t < n; ++t) {
      const OrbitSphere& p = o.spheres[a + t];
      kids[t] = ex.children(words[t], p.base, p.radius, static_cast<int>(a + t), gen);
    }
    std::size_t total = o.spheres.size();
    for (const auto& k : kids) total += k.size();
    if (total > lim.max_spheres) {
      o.truncated = true;
      std::ostringstream os;
      os << "generation " << gen << " would exceed " << lim.max_spheres
         << " spheres; stopped at generation " << gen - 1;
      o.note = os.str();
      for (int k = gen; k <= lim.max_generation; ++k)
        o.generation_start.push_back(o.spheres.size());
      return o;
    }
    for (auto& k : kids) o.spheres.insert(o.spheres.end(), k.begin(), k.end());
    o.generation_start.push_back(o.spheres.size());
  }
  return o;
}

NestingReport verify_nesting(const Orbit& o) {
  NestingReport rep;
  const int G = static_cast<int>(o.generation_start.size()) - 1;
  for (int k = 0; k < G; ++k) rep.max_radius.push_back(o.max_radius(k));

  // Parents and order.
  for (std::size_t i = 0; i < o.spheres.size(); ++i) {
    const OrbitSphere& s = o.spheres[i];
    if (s.generation == 0) continue;
    ++rep.checked;
    if (s.parent < 0 || static_cast<std::size_t>(s.parent) >= i) {
      ++rep.order_violations;
      continue;
    }
    const OrbitSphere& p = o.spheres[s.parent];
    if (p.generation + 1 != s.generation) ++rep.order_violations;
    if ((s.center - p.center).norm() + s.radius >= p.radius) ++rep.violations;
  }

  // Uniqueness: every sphere strictly containing s must be an ancestor.
  for (int m = 0; m + 1 < G; ++m) {
    if (o.generation_size(m) == 0) continue;
    kernels::BallSoA soa;
    const std::size_t a = o.generation_start[m];
    for (std::size_t i = a; i < o.generation_start[m + 1]; ++i)
      soa.push(o.spheres[i].center, o.spheres[i].radius);
    const double rm = o.max_radius(m);
    const kernels::BallGrid grid(soa, 2 * rm);
    std::size_t extra = 0;
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : extra)
    for (long i = static_cast<long>(a);
         i < static_cast<long>(o.spheres.size()); ++i) {
      const OrbitSphere& s = o.spheres[i];
      long anc = i;
      while (o.spheres[anc].generation > m) anc = o.spheres[anc].parent;
      for (int j : grid.near(s.center, rm)) {
        const std::size_t q = a + j;
        if (static_cast<long>(q) == anc) continue;
        const OrbitSphere& c = o.spheres[q];
        if ((s.center - c.center).norm() + s.radius < c.radius) ++extra;
      }
    }
    rep.violations += extra;
  }

  // Duplicates within a generation (identical center and radius).
  for (int k = 0; k < G; ++k) {
    std::vector<std::size_t> idx;
    for (std::size_t i = o.generation_start[k]; i < o.generation_start[k + 1]; ++i)
      idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return o.spheres[x].center[0] < o.spheres[y].center[0];
    });
    for (std::size_t t = 0; t < idx.size(); ++t) {
      const OrbitSphere& s = o.spheres[idx[t]];
      const double tol = 1e-9 * std::max(1.0, s.center.norm());
      for (std::size_t u = t + 1; u < idx.size(); ++u) {
        const OrbitSphere& c = o.spheres[idx[u]];
        if (c.center[0] - s.center[0] > tol) break;
        if ((c.center - s.center).norm() <= tol &&
            std::abs(c.radius - s.radius) <= tol)
          ++rep.duplicates;
      }
    }
  }
  return rep;
}

// -------------------------------------------------------------- polyhedra

namespace {

using PointKey = std::array<std::int64_t, 4>;

struct PointKeyHash {
  std::size_t operator()(const PointKey& k) const {
    std::uint64_t h = 0;
    for (auto x : k) h = kernels::mix_seed(h ^ static_cast<std::uint64_t>(x));
    return static_cast<std::size_t>(h);
  }
};

// Points keyed on a grid; lookups probe neighboring cells near boundaries.
class PointSet {
 public:
  explicit PointSet(double grid) : grid_(grid) {}

  long find(const Vec4& p) const {
    const double tol = 1e-9 * std::max(1.0, p.norm());
    PointKey base{};
    std::array<int, 4> alt{};
    for (int i = 0; i < 4; ++i) {
      const double x = std::floor(p[i] / grid_);
      base[i] = static_cast<std::int64_t>(x);
      const double f = p[i] - x * grid_;
      alt[i] = f < tol ? -1 : (grid_ - f < tol ? 1 : 0);
    }
    for (int m = 0; m < 16; ++m) {
      PointKey t = base;
      bool skip = false;
      for (int i = 0; i < 4; ++i)
        if ((m >> i) & 1) {
          if (alt[i] == 0) skip = true;
          t[i] += alt[i];
        }
      if (skip) continue;
      const auto it = map_.find(t);
      if (it == map_.end()) continue;
      for (long idx : it->second)
        if ((pts_[idx] - p).norm() <= tol) return idx;
    }
    return -1;
  }

  long insert(const Vec4& p) {
    PointKey k{};
    for (int i = 0; i < 4; ++i) k[i] = static_cast<std::int64_t>(std::floor(p[i] / grid_));
    const long idx = static_cast<long>(pts_.size());
    map_[k].push_back(idx);
    pts_.push_back(p);
    return idx;
  }

 private:
  double grid_;
  std::vector<Vec4> pts_;
  std::unordered_map<PointKey, std::vector<long>, PointKeyHash> map_;
};

Vec4 invert_point(const InversiveSphere& s, const Vec4& p) {
  const Vec4 d = p - s.center();
  return s.center() + (s.radius() * s.radius() / d.squaredNorm()) * d;
}

// h(p) for h = R_{w1} ... R_{wn}.
Vec4 apply_word(const ReflectionGroup& g, const Word& w, Vec4 p) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) p = invert_point(g.spheres[*it], p);
  return p;
}

InversiveSphere word_sphere(const ReflectionGroup& g, const Word& w, int j) {
  InversiveSphere x = g.spheres[j];
  for (auto it = w.rbegin(); it != w.rend(); ++it) x = invert_sphere(g.spheres[*it], x);
  return x;
}

Word free_reduce(const Word& w) {
  Word out;
  for (int x : w) {
    if (!out.empty() && out.back() == x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

struct UnionFind {
  std::vector<std::size_t> p;
  explicit UnionFind(std::size_t n) : p(n) {
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
  }
  std::size_t find(std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

// A union of chambers h(P_0) with its boundary faces (h, j) grouped into
// sides: faces on one sphere meeting along a right-angled ridge merge.
struct ChamberSet {
  const ReflectionGroup& g;
  Vec4 p0;                       // interior point of P_0
  std::vector<Vec4> mirror_p0;   // R_j(p0)
  std::vector<Word> words;
  std::vector<Vec4> keys;        // h(p0)
  PointSet index{1e-3};

  ChamberSet(const ReflectionGroup& group, const Vec4& p) : g(group), p0(p) {
    for (const auto& s : g.spheres) mirror_p0.push_back(invert_point(s, p0));
    add({}, p0);
  }
  void add(Word w, const Vec4& key) {
    words.push_back(std::move(w));
    keys.push_back(key);
    index.insert(key);
  }
  long chamber_of(const Vec4& key) const { return index.find(key); }

  struct Faces {
    std::vector<std::uint64_t> id;  // chamber * N + j, ascending
    std::vector<std::size_t> side;  // component root per face
    std::size_t sides = 0;
    long face(std::uint64_t key) const {
      const auto it = std::lower_bound(id.begin(), id.end(), key);
      return it != id.end() && *it == key ? static_cast<long>(it - id.begin()) : -1;
    }
  };

  Faces faces() const {
    const std::size_t N = g.size(), C = words.size();
    std::vector<std::vector<int>> inner(C);  // generators j with hR_j inside
    std::vector<std::vector<std::pair<int, long>>> nb(C);
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < static_cast<long>(C); ++c)
      for (std::size_t j = 0; j < N; ++j) {
        const long d = chamber_of(apply_word(g, words[c], mirror_p0[j]));
        if (d >= 0) nb[c].emplace_back(static_cast<int>(j), d);
      }
    Faces f;
    for (std::size_t c = 0; c < C; ++c) {
      std::size_t t = 0;
      for (std::size_t j = 0; j < N; ++j) {
        if (t < nb[c].size() && nb[c][t].first == static_cast<int>(j)) {
          ++t;
          continue;
        }
        f.id.push_back(c * N + j);
      }
    }
    UnionFind uf(f.id.size());
    std::size_t merges = 0;
    for (std::size_t c = 0; c < C; ++c)
      for (const auto& [s, d] : nb[c])
        for (const auto& [j, m] : g.finite[s]) {
          if (m != 2) continue;
          const long a = f.face(c * N + j), b = f.face(static_cast<std::uint64_t>(d) * N + j);
          if (a >= 0 && b >= 0 && uf.unite(a, b)) ++merges;
        }
    f.side.resize(f.id.size());
    for (std::size_t i = 0; i < f.id.size(); ++i) f.side[i] = uf.find(i);
    f.sides = f.id.size() - merges;
    return f;
  }
};

Vec4 interior_point(const ReflectionGroup& g) {
  Vec4 hi = g.spheres[0].center();
  double r = 0;
  for (const auto& s : g.spheres) {
    hi = hi.cwiseMax(s.center());
    r = std::max(r, s.radius());
  }
  return hi + Vec4::Constant(3 * r + 1.0);
}

}  // namespace

std::vector<PolyhedronStage> polyhedron_stages(const ReflectionGroup& g,
                                               const Orbit& orbit, int K) {
  std::vector<PolyhedronStage> stages;
  if (g.size() == 0) return stages;
  const std::size_t N = g.size();
  ChamberSet P(g, interior_point(g));
  auto faces = P.faces();
  PolyhedronStage p0;
  p0.side_count = p0.recount = faces.sides;
  p0.chambers = 1;
  stages.push_back(p0);

  for (int k = 1; k <= K; ++k) {
    // Lowest-seq orbit sphere w(s_b) on the boundary (exactly one of the
    // chambers w, w R_b inside) whose mirror copy avoids every chamber.
    long reflector = -1;
    std::vector<Vec4> copy;
    Word conj;
    long mirror_face = -1;
    for (std::size_t q = 0; q < orbit.spheres.size() && reflector < 0; ++q) {
      const Word w = orbit.word(q);
      const int b = orbit.spheres[q].base;
      const long c1 = P.chamber_of(apply_word(g, w, P.p0));
      const long c2 = P.chamber_of(apply_word(g, w, P.mirror_p0[b]));
      if ((c1 >= 0) == (c2 >= 0)) continue;
      const InversiveSphere S = orbit.sphere(q);
      copy.clear();
      bool clash = false;
      for (const auto& key : P.keys) {
        const Vec4 im = invert_point(S, key);
        if (P.chamber_of(im) >= 0) {
          clash = true;
          break;
        }
        copy.push_back(im);
      }
      if (clash) continue;
      reflector = static_cast<long>(q);
      conj = w;
      conj.push_back(b);
      for (auto it = w.rbegin(); it != w.rend(); ++it) conj.push_back(*it);
      // The mirror face seen from inside.
      mirror_face = c1 >= 0 ? faces.face(static_cast<std::uint64_t>(c1) * N + b)
                            : -1;
      if (c1 < 0) {
        // Chamber w R_b is inside; its wall b lies on S as well.
        mirror_face = faces.face(static_cast<std::uint64_t>(c2) * N + b);
      }
    }
    if (reflector < 0)
      throw std::runtime_error("polyhedron stages: orbit exhausted before stage " +
                               std::to_string(k));

    PolyhedronStage st;
    st.k = k;
    st.reflector_seq = reflector;
    // Sides of P_{k-1} orthogonal to the mirror along a ridge of the mirror face.
    if (mirror_face >= 0) {
      const std::size_t c = faces.id[mirror_face] / N;
      const int b = static_cast<int>(faces.id[mirror_face] % N);
      std::vector<std::size_t> roots;
      for (const auto& [t, m] : g.finite[b]) {
        if (m != 2) continue;
        const long f = faces.face(c * N + t);
        if (f >= 0) roots.push_back(faces.side[f]);
      }
      std::sort(roots.begin(), roots.end());
      st.orthogonal = static_cast<std::size_t>(
          std::unique(roots.begin(), roots.end()) - roots.begin());
    }
    st.recount = 2 * (stages.back().side_count - 1) - st.orthogonal;

    const std::size_t old = P.words.size();
    for (std::size_t c = 0; c < old; ++c) {
      Word w = conj;
      w.insert(w.end(), P.words[c].begin(), P.words[c].end());
      P.add(free_reduce(w), copy[c]);
    }
    faces = P.faces();
    st.side_count = faces.sides;
    st.chambers = P.words.size();
    stages.push_back(std::move(st));
  }

  // One representative face per side of the last stage.
  auto& last = stages.back();
  for (std::size_t i = 0; i < faces.id.size(); ++i) {
    if (faces.side[i] != i) continue;
    const std::size_t c = faces.id[i] / N;
    const int j = static_cast<int>(faces.id[i] % N);
    const InversiveSphere s = word_sphere(g, P.words[c], j);
    last.sides.push_back({s.center(), s.radius(), P.words[c], j});
  }
  return stages;
}

DomainReport fundamental_domain_check(const ReflectionGroup& g,
                                      std::size_t n_samples, std::uint64_t seed) {
  DomainReport rep;
  rep.generators = g.size();
  if (g.size() == 0) return rep;
  kernels::BallSoA soa;
  Vec4 lo = g.spheres[0].center(), hi = lo;
  double r_max = 0;
  for (const auto& s : g.spheres) {
    soa.push(s.center(), s.radius());
    lo = lo.cwiseMin(s.center());
    hi = hi.cwiseMax(s.center());
    r_max = std::max(r_max, s.radius());
  }
  lo.array() -= 4 * r_max;
  hi.array() += 4 * r_max;
  const kernels::BallGrid grid(soa, 2 * r_max);

  // Half the samples uniform in a padded box, half in shells just outside
  // random balls where the domain is thin.
  std::mt19937_64 rng(kernels::mix_seed(seed));
  std::uniform_real_distribution<double> U(0, 1);
  std::normal_distribution<double> N(0, 1);
  std::vector<Vec4> pts;
  pts.reserve(n_samples);
  while (pts.size() < n_samples) {
    Vec4 p;
    if (pts.size() % 2 == 0) {
      for (int i = 0; i < 4; ++i) p[i] = lo[i] + (hi[i] - lo[i]) * U(rng);
    } else {
      const auto b = static_cast<std::size_t>(U(rng) * static_cast<double>(g.size()));
      const std::size_t i = std::min(b, g.size() - 1);
      Vec4 d(N(rng), N(rng), N(rng), N(rng));
      p = soa.center(i) + d.normalized() * soa.r[i] * (1.0 + 0.5 * U(rng));
    }
    bool inside = false;
    for (int j : grid.near(p, r_max))
      if ((p - soa.center(j)).norm() <= soa.r[j]) {
        inside = true;
        break;
      }
    if (inside) {
      ++rep.rejected;
      continue;
    }
    pts.push_back(p);
  }
  rep.samples = pts.size();
  rep.violations = kernels::inversion_escapes_omp(soa, pts);

  // Infinity lies outside every ball; its image under R_i is the center.
  rep.infinity_checked = true;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Frame f{g.spheres[i].center(), g.spheres[i].radius()};
    const InversiveSphere local = f.to_local(g.spheres[i]);
    const IdealPoint img = MobiusMap::reflection(local).apply(IdealPoint::infinity());
    if (!local.contains(img)) ++rep.violations;
  }
  return rep;
}

void write_orbit(std::ostream& out, const Orbit& o) {
  out << "# seq word x1 x2 x3 x4 radius parent generation\n" << std::setprecision(17);
  for (std::size_t i = 0; i < o.spheres.size(); ++i) {
    const auto& s = o.spheres[i];
    Word w = o.word(i);
    w.push_back(s.base);
    out << i << ' ' << format_word(w);
    for (int d = 0; d < 4; ++d) out << ' ' << s.center[d];
    out << ' ' << s.radius << ' ' << s.parent << ' ' << s.generation << '\n';
  }
}

void write_stages(std::ostream& out, const std::vector<PolyhedronStage>& stages) {
  out << "# k chambers sides recount orthogonal reflector_seq\n";
  for (const auto& s : stages)
    out << s.k << ' ' << s.chambers << ' ' << s.side_count << ' ' << s.recount << ' '
        << s.orthogonal << ' ' << s.reflector_seq << '\n';
}

void write_sides(std::ostream& out, const PolyhedronStage& stage) {
  out << "# word gen x1 x2 x3 x4 radius\n" << std::setprecision(17);
  for (const auto& s : stage.sides) {
    out << format_word(s.word) << ' ' << s.gen;
    for (int d = 0; d < 4; ++d) out << ' ' << s.center[d];
    out << ' ' << s.radius << '\n';
  }
}

}  // namespace wildknot
