#include "wildknot/construction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <tuple>

namespace wildknot {

namespace {

struct RawFace {
  IVec4 corner;
  int a, b;
  int host;
  std::size_t seq;
  auto key() const { return std::tie(corner, a, b); }
};

std::string face_name(const SurfaceFace& f) {
  std::string s = "square at (";
  for (int d = 0; d < 4; ++d) s += (d ? "," : "") + std::to_string(f.corner[d]);
  return s + ") axes " + std::to_string(f.a + 1) + std::to_string(f.b + 1);
}

}  // namespace

KnotSurface knot_surface(const CubeComplex& c, std::int64_t scale) {
  if (scale < 1) throw std::invalid_argument("knot_surface: scale must be >= 1");
  const auto chain = c.chain();

  std::vector<RawFace> raw;
  for (std::size_t h = 0; h < chain.size(); ++h) {
    const Cube3& q = chain[h];
    if (q.omitted < 0 || q.omitted > 3 || q.edge < 1)
      throw ComplexError({"malformed cube in chain position " + std::to_string(h)});
    const auto sp = q.span();
    const std::int64_t e = q.edge * scale;
    IVec4 lo;
    for (int d = 0; d < 4; ++d) lo[d] = q.corner[d] * scale;
    for (int fi = 0; fi < 3; ++fi) {
      const int f = sp[fi];
      const int a = sp[(fi + 1) % 3], b = sp[(fi + 2) % 3];
      const int lo_ax = std::min(a, b), hi_ax = std::max(a, b);
      for (std::int64_t side : {lo[f], lo[f] + e})
        for (std::int64_t i = 0; i < e; ++i)
          for (std::int64_t j = 0; j < e; ++j) {
            RawFace r{lo, lo_ax, hi_ax, static_cast<int>(h), raw.size()};
            r.corner[f] = side;
            r.corner[lo_ax] += i;
            r.corner[hi_ax] += j;
            raw.push_back(r);
          }
    }
  }

  std::vector<RawFace> sorted = raw;
  std::sort(sorted.begin(), sorted.end(),
            [](const RawFace& x, const RawFace& y) { return x.key() < y.key(); });
  std::vector<RawFace> kept;
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].key() == sorted[i].key()) ++j;
    if (j - i == 1) kept.push_back(sorted[i]);
    if (j - i > 2) {
      SurfaceFace f{sorted[i].corner, sorted[i].a, sorted[i].b, sorted[i].host};
      bad.push_back(face_name(f) + " shared by more than two cubes");
    }
    i = j;
  }
  if (!bad.empty()) throw ComplexError(bad);
  std::sort(kept.begin(), kept.end(),
            [](const RawFace& x, const RawFace& y) { return x.seq < y.seq; });

  KnotSurface s;
  s.scale = scale;
  std::map<IVec4, int> vindex;
  std::map<std::pair<int, int>, int> eindex;
  auto vertex = [&](const IVec4& p) {
    auto [it, fresh] = vindex.emplace(p, static_cast<int>(s.vertices.size()));
    if (fresh) s.vertices.push_back(p);
    return it->second;
  };
  auto edge = [&](int u, int v) {
    const auto k = std::minmax(u, v);
    auto [it, fresh] = eindex.emplace(k, static_cast<int>(s.edges.size()));
    if (fresh) s.edges.push_back({k.first, k.second});
    return it->second;
  };

  for (const auto& r : kept) {
    SurfaceFace f{r.corner, r.a, r.b, r.host};
    IVec4 p1 = f.corner, p2 = f.corner, p3 = f.corner;
    p1[f.a] += 1;
    p2[f.a] += 1;
    p2[f.b] += 1;
    p3[f.b] += 1;
    const std::array<int, 4> v = {vertex(f.corner), vertex(p1), vertex(p2),
                                  vertex(p3)};
    s.faces.push_back(f);
    s.face_vertices.push_back(v);
    s.face_edges.push_back(
        {edge(v[0], v[1]), edge(v[1], v[2]), edge(v[2], v[3]), edge(v[3], v[0])});
  }

  // Closedness: every edge borders exactly two faces.
  std::vector<std::vector<int>> edge_faces(s.edges.size());
  for (std::size_t f = 0; f < s.faces.size(); ++f)
    for (int e : s.face_edges[f]) edge_faces[e].push_back(static_cast<int>(f));
  for (std::size_t e = 0; e < s.edges.size(); ++e)
    if (edge_faces[e].size() != 2)
      bad.push_back("edge " + std::to_string(e) + " borders " +
                    std::to_string(edge_faces[e].size()) + " faces");
  if (!bad.empty()) throw ComplexError(bad);

  // Direction in which face f traverses edge slot k: +1 for v[k] -> v[k+1]
  // matching the stored (low, high) order, -1 otherwise.
  auto traversal = [&](int f, int e) {
    const auto& v = s.face_vertices[f];
    for (int k = 0; k < 4; ++k)
      if (s.face_edges[f][k] == e) return v[k] < v[(k + 1) % 4] ? 1 : -1;
    return 0;
  };

  s.orientation.assign(s.faces.size(), 0);
  std::deque<int> queue{0};
  if (!s.faces.empty()) s.orientation[0] = 1;
  std::size_t reached = s.faces.empty() ? 0 : 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (int e : s.face_edges[f]) {
      const int g = edge_faces[e][0] == f ? edge_faces[e][1] : edge_faces[e][0];
      const int want = -s.orientation[f] * traversal(f, e) * traversal(g, e);
      if (s.orientation[g] == 0) {
        s.orientation[g] = want;
        ++reached;
        queue.push_back(g);
      } else if (s.orientation[g] != want) {
        throw ComplexError({"surface is not orientable near " + face_name(s.faces[g])});
      }
    }
  }
  if (reached != s.faces.size()) throw ComplexError({"surface is not connected"});

  // Manifold vertices: incident faces form a single cycle around the vertex.
  std::vector<std::vector<int>> vfaces(s.vertices.size());
  for (std::size_t f = 0; f < s.faces.size(); ++f)
    for (int v : s.face_vertices[f]) vfaces[v].push_back(static_cast<int>(f));
  s.vertex_host.assign(s.vertices.size(), 0);
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    const auto& fs = vfaces[v];
    int host = s.faces[fs[0]].host;
    for (int f : fs) host = std::min(host, s.faces[f].host);
    s.vertex_host[v] = host;
    // Walk from the first face across edges incident to v.
    std::vector<char> seen(fs.size(), 0);
    std::deque<std::size_t> q{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop_front();
      for (int e : s.face_edges[fs[i]]) {
        if (s.edges[e][0] != static_cast<int>(v) && s.edges[e][1] != static_cast<int>(v))
          continue;
        for (int g : edge_faces[e]) {
          const auto it = std::find(fs.begin(), fs.end(), g);
          const auto k = static_cast<std::size_t>(it - fs.begin());
          if (!seen[k]) {
            seen[k] = 1;
            ++count;
            q.push_back(k);
          }
        }
      }
    }
    if (count != fs.size())
      bad.push_back("surface is pinched at a vertex of " + face_name(s.faces[fs[0]]));
  }
  if (!bad.empty()) throw ComplexError(bad);

  if (s.euler_characteristic() != 2)
    throw ComplexError({"surface has Euler characteristic " +
                        std::to_string(s.euler_characteristic()) + ", expected 2"});
  return s;
}

}  // namespace wildknot
