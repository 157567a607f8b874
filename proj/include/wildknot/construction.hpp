#pragma once

// PL support of the ribbon 2-knot (a chain of axis-aligned 3-cubes in R^4),
// its boundary surface, and the covering family of round 4-balls.

#include "wildknot/inversive.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildknot {

using IVec4 = std::array<std::int64_t, 4>;

/// Axis-aligned 3-cube in R^4.  Coordinates are integers in units of the
/// small edge length; the cube spans every axis except `omitted` (0-based).
struct Cube3 {
  IVec4 corner{};
  std::int64_t edge = 1;
  int omitted = 3;

  std::array<int, 3> span() const;
  bool operator==(const Cube3&) const = default;
};

/// Q0, the tube Q2..Qm and Q1.  A complex without Q1 and without tube cubes
/// is the degenerate single-cube unknot used in tests.
struct CubeComplex {
  double unit = 1.0;             // small edge length
  std::int64_t big_edge = 27;    // in units
  std::vector<std::int64_t> levels;  // allowed x4 values of level cubes
  Cube3 q0;
  std::vector<Cube3> tube;
  bool has_q1 = true;
  Cube3 q1;

  /// Chain order: Q0, tube..., Q1.
  std::vector<Cube3> chain() const;
  bool operator==(const CubeComplex&) const = default;
};

/// Carries every problem found, one message per failing cube or pair.
class ComplexError : public std::runtime_error {
 public:
  explicit ComplexError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Empty result means valid.
std::vector<std::string> validate_complex(const CubeComplex& c);

CubeComplex parse_complex(std::istream& in);  // throws ComplexError
CubeComplex load_complex(const std::string& path);
void write_complex(std::ostream& out, const CubeComplex& c);

CubeComplex spun_trefoil_preset();
/// Two 3x3x3 cubes joined by a straight three-cube tube in one 3-plane.
CubeComplex dumbbell_fixture();
CubeComplex single_cube(std::int64_t edge);

/// Square 2-face of the lattice of spacing unit/scale: corner + [0,1] e_a +
/// [0,1] e_b in lattice coordinates, a < b.
struct SurfaceFace {
  IVec4 corner{};
  int a = 0, b = 1;
  int host = 0;  // chain index of the cube contributing this face
};

struct KnotSurface {
  std::int64_t scale = 1;  // lattice points per small unit
  std::vector<SurfaceFace> faces;
  std::vector<IVec4> vertices;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 4>> face_vertices;  // cyclic order
  std::vector<std::array<int, 4>> face_edges;
  std::vector<int> orientation;  // +1 / -1 per face, consistent
  std::vector<int> vertex_host;  // lowest host among incident faces

  long euler_characteristic() const {
    return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(faces.size());
  }
};

/// Boundary squares of the chain with shared squares removed, each small
/// unit square subdivided into scale x scale lattice squares.  Throws
/// ComplexError when the result is not a closed connected orientable sphere.
KnotSurface knot_surface(const CubeComplex& c, std::int64_t scale = 1);

enum class BallRole { Vertex, Face, Junction };
const char* role_name(BallRole r);

struct Ball {
  Vec4 center;
  double radius = 0;
  InversiveSphere sphere = InversiveSphere::from_center_radius(Vec4::Zero(), 1);
  BallRole role = BallRole::Vertex;
  int host = 0;   // chain index
  int face = -1;  // surface face for face balls
};

struct Adjacency {
  int i, j;
  int m;  // target angle pi/m
};

/// Closed-form parameters for a square of side l.
struct CoverParameters {
  double vertex_radius, offset, face_radius, center_radius;
  static CoverParameters for_edge(double l);
};

struct BallCover {
  int refinement = 0;
  double spacing = 1;  // lattice spacing of the refined surface
  CoverParameters params{};
  KnotSurface surface;
  std::vector<Ball> balls;
  std::vector<Adjacency> adjacency;
  std::vector<int> vertex_ball;                 // surface vertex -> ball
  std::vector<std::array<int, 5>> face_balls;   // 4 offsets then center
  /// Vertex balls on the boundary of the square shared by chain cubes j and
  /// j+1, in cyclic order.  The first and last rings are the junctions.
  std::vector<std::vector<int>> amalgam_rings;
};

/// Deterministic: iteration follows surface order.
BallCover build_cover(const CubeComplex& c, int k = 0);

/// Euclidean point of a lattice vertex of the (refined) surface.
Vec4 lattice_point(const BallCover& cov, const IVec4& p);

struct CoverReport {
  double max_angle_residual = 0;  // |cos realized - cos target|
  std::size_t adjacency_count = 0;
  std::size_t pairs_checked = 0;
  std::vector<std::string> illegal;  // non-adjacent overlapping pairs
  double max_plane_residual = 0;     // center distance to supporting plane
  std::size_t samples = 0, misses = 0;
  std::vector<int> faces_with_misses;
  double coverage() const {
    return samples == 0 ? 1.0
                        : 1.0 - static_cast<double>(misses) /
                                    static_cast<double>(samples);
  }
  bool ok(double tol = 1e-9) const {
    return max_angle_residual <= tol && illegal.empty() && misses == 0 &&
           max_plane_residual <= tol;
  }
};

/// `skip` removes one ball from the coverage test (-1 keeps all).
CoverReport validate_cover(const BallCover& cov, std::size_t samples_per_face,
                           std::uint64_t seed = 1, int skip = -1);

}  // namespace wildknot
