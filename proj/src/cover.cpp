#include "wildknot/construction.hpp"
#include "wildknot/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace wildknot {

const char* role_name(BallRole r) {
  switch (r) {
    case BallRole::Vertex: return "vertex";
    case BallRole::Face: return "face";
    case BallRole::Junction: return "junction";
  }
  return "?";
}

CoverParameters CoverParameters::for_edge(double l) {
  CoverParameters p{};
  p.vertex_radius = l / std::sqrt(3.0);
  p.offset = l * (3.0 - std::sqrt(7.0)) / 2.0;
  p.face_radius = p.offset * std::sqrt(2.0 / 3.0);
  p.center_radius = p.offset / std::sqrt(3.0);
  return p;
}

Vec4 lattice_point(const BallCover& cov, const IVec4& p) {
  Vec4 x;
  for (int d = 0; d < 4; ++d) x[d] = static_cast<double>(p[d]) * cov.spacing;
  return x;
}

namespace {

Ball make_ball(const Vec4& c, double r, BallRole role, int host, int face) {
  Ball b;
  b.center = c;
  b.radius = r;
  b.sphere = InversiveSphere::from_center_radius(c, r);
  b.role = role;
  b.host = host;
  b.face = face;
  return b;
}

// Closed box of the unit square shared by consecutive chain cubes, in
// lattice coordinates of the given scale.
std::pair<IVec4, IVec4> shared_square(const Cube3& x, const Cube3& y,
                                      std::int64_t scale) {
  IVec4 lo{}, hi{};
  for (int d = 0; d < 4; ++d) {
    const std::int64_t xl = x.corner[d], xh = xl + (d == x.omitted ? 0 : x.edge);
    const std::int64_t yl = y.corner[d], yh = yl + (d == y.omitted ? 0 : y.edge);
    lo[d] = std::max(xl, yl) * scale;
    hi[d] = std::min(xh, yh) * scale;
  }
  return {lo, hi};
}

bool on_square_boundary(const IVec4& p, const IVec4& lo, const IVec4& hi) {
  bool edge = false;
  for (int d = 0; d < 4; ++d) {
    if (p[d] < lo[d] || p[d] > hi[d]) return false;
    if (lo[d] != hi[d] && (p[d] == lo[d] || p[d] == hi[d])) edge = true;
  }
  return edge;
}

}  // namespace

BallCover build_cover(const CubeComplex& c, int k) {
  if (k < 0) throw std::invalid_argument("build_cover: refinement must be >= 0");
  BallCover cov;
  cov.refinement = k;
  const std::int64_t scale = 2 * k + 1;
  cov.surface = knot_surface(c, scale);
  cov.spacing = c.unit / static_cast<double>(scale);
  cov.params = CoverParameters::for_edge(cov.spacing);
  const auto& s = cov.surface;
  const auto& P = cov.params;

  const auto chain = c.chain();
  std::vector<std::pair<IVec4, IVec4>> squares;
  for (std::size_t j = 0; j + 1 < chain.size(); ++j)
    squares.push_back(shared_square(chain[j], chain[j + 1], scale));

  cov.amalgam_rings.assign(squares.size(), {});
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    BallRole role = BallRole::Vertex;
    for (std::size_t j = 0; j < squares.size(); ++j) {
      if (!on_square_boundary(s.vertices[v], squares[j].first, squares[j].second))
        continue;
      cov.amalgam_rings[j].push_back(static_cast<int>(v));
      if (j == 0 || j + 1 == squares.size()) role = BallRole::Junction;
    }
    cov.vertex_ball.push_back(static_cast<int>(cov.balls.size()));
    cov.balls.push_back(make_ball(lattice_point(cov, s.vertices[v]),
                                  P.vertex_radius, role, s.vertex_host[v], -1));
  }

  // Rings: vertex indices -> ball indices in cyclic order around the center.
  for (std::size_t j = 0; j < squares.size(); ++j) {
    auto& ring = cov.amalgam_rings[j];
    const auto& [lo, hi] = squares[j];
    int ax[2], n = 0;
    for (int d = 0; d < 4 && n < 2; ++d)
      if (lo[d] != hi[d]) ax[n++] = d;
    auto angle = [&](int v) {
      const auto& p = s.vertices[v];
      return std::atan2(2.0 * p[ax[1]] - lo[ax[1]] - hi[ax[1]],
                        2.0 * p[ax[0]] - lo[ax[0]] - hi[ax[0]]);
    };
    std::stable_sort(ring.begin(), ring.end(),
                     [&](int x, int y) { return angle(x) < angle(y); });
    for (int& v : ring) v = cov.vertex_ball[v];
  }

  std::vector<Adjacency> adj;
  auto link = [&](int i, int j, int m) {
    adj.push_back({std::min(i, j), std::max(i, j), m});
  };
  for (const auto& e : s.edges)
    link(cov.vertex_ball[e[0]], cov.vertex_ball[e[1]], 3);

  for (std::size_t f = 0; f < s.faces.size(); ++f) {
    const auto& F = s.faces[f];
    Vec4 ea = Vec4::Zero(), eb = Vec4::Zero();
    ea[F.a] = 1.0;
    eb[F.b] = 1.0;
    const Vec4 mid = lattice_point(cov, F.corner) + 0.5 * cov.spacing * (ea + eb);
    const Vec4 dirs[4] = {ea, eb, -ea, -eb};
    std::array<int, 5> ids{};
    for (int q = 0; q < 4; ++q) {
      ids[q] = static_cast<int>(cov.balls.size());
      cov.balls.push_back(make_ball(mid + P.offset * dirs[q], P.face_radius,
                                    BallRole::Face, F.host, static_cast<int>(f)));
    }
    ids[4] = static_cast<int>(cov.balls.size());
    cov.balls.push_back(make_ball(mid, P.center_radius, BallRole::Face, F.host,
                                  static_cast<int>(f)));
    cov.face_balls.push_back(ids);

    const auto& v = s.face_vertices[f];
    for (int q = 0; q < 4; ++q) {
      // Offset q points toward the edge from vertex slot q+1 to q+2.
      link(ids[q], cov.vertex_ball[v[(q + 1) % 4]], 2);
      link(ids[q], cov.vertex_ball[v[(q + 2) % 4]], 2);
      link(ids[q], ids[(q + 1) % 4], 3);
      link(ids[q], ids[4], 2);
    }
  }
  std::sort(adj.begin(), adj.end(), [](const Adjacency& x, const Adjacency& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  cov.adjacency = std::move(adj);
  return cov;
}

CoverReport validate_cover(const BallCover& cov, std::size_t samples_per_face,
                           std::uint64_t seed, int skip) {
  CoverReport rep;
  const auto& balls = cov.balls;
  kernels::BallSoA soa;
  for (const auto& b : balls) soa.push(b.center, b.radius);

  std::set<std::pair<int, int>> adjacent;
  for (const auto& a : cov.adjacency) {
    adjacent.emplace(a.i, a.j);
    const double realized = -inversive_product(balls[a.i].sphere, balls[a.j].sphere);
    const double target = std::cos(M_PI / a.m);
    rep.max_angle_residual =
        std::max(rep.max_angle_residual, std::abs(realized - target));
  }
  rep.adjacency_count = cov.adjacency.size();

  const auto pairs = kernels::touching_pairs_omp(soa, 1e-7 * cov.spacing);
  rep.pairs_checked = pairs.size();
  for (const auto& [i, j] : pairs) {
    if (adjacent.count({i, j})) continue;
    const auto cfg = pair_configuration(balls[i].sphere, balls[j].sphere);
    if (std::holds_alternative<DisjointExterior>(cfg)) continue;
    std::ostringstream os;
    os << "balls " << i << " (" << role_name(balls[i].role) << ") and " << j
       << " (" << role_name(balls[j].role) << "): " << describe(cfg);
    rep.illegal.push_back(os.str());
  }

  const auto& s = cov.surface;
  for (std::size_t f = 0; f < s.faces.size(); ++f) {
    const auto& F = s.faces[f];
    const Vec4 base = lattice_point(cov, F.corner);
    for (int id : cov.face_balls[f])
      for (int d = 0; d < 4; ++d)
        if (d != F.a && d != F.b)
          rep.max_plane_residual = std::max(
              rep.max_plane_residual, std::abs(balls[id].center[d] - base[d]));
  }
  for (std::size_t v = 0; v < s.vertices.size(); ++v)
    rep.max_plane_residual = std::max(
        rep.max_plane_residual,
        (balls[cov.vertex_ball[v]].center - lattice_point(cov, s.vertices[v]))
            .cwiseAbs()
            .maxCoeff());

  if (samples_per_face > 0) {
    double rmax = 0;
    for (const auto& b : balls) rmax = std::max(rmax, b.radius);
    const kernels::BallGrid grid(soa, 2 * rmax);
    std::vector<kernels::Patch> patches(s.faces.size());
    for (std::size_t f = 0; f < s.faces.size(); ++f) {
      const auto& F = s.faces[f];
      auto& p = patches[f];
      p.origin = lattice_point(cov, F.corner);
      p.du = Vec4::Zero();
      p.dv = Vec4::Zero();
      p.du[F.a] = cov.spacing;
      p.dv[F.b] = cov.spacing;
      p.candidates = grid.near(p.origin + 0.5 * (p.du + p.dv),
                               cov.spacing * std::sqrt(0.5) + rmax);
      p.seed = kernels::mix_seed(seed ^ static_cast<std::uint64_t>(f));
    }
    const auto miss = kernels::coverage_misses_omp(soa, patches, samples_per_face, skip);
    for (std::size_t f = 0; f < miss.size(); ++f) {
      rep.misses += miss[f];
      if (miss[f]) rep.faces_with_misses.push_back(static_cast<int>(f));
    }
    rep.samples = samples_per_face * s.faces.size();
  }
  return rep;
}

}  // namespace wildknot
