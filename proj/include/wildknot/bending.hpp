#pragma once

// One-parameter bending deformations along the amalgam subgroups Gamma_j.
//
// The four Gamma_j spheres have centers on a square in an affine 2-plane P
// and a common orthogonal circle in P.  Their polars span a 4-dim subspace
// V of R^{5,1}; a Mobius map commuting with all four reflections and
// connected to the identity must fix V pointwise, so E_t is the rotation by
// t about P (identity on V, rotation of the spacelike plane V^perp).

#include "wildknot/group.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildknot {

class BendingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BendingLocus {
  int j = 0;
  std::vector<int> gamma;  // Gamma_j generators
  Vec4 center = Vec4::Zero();
  double radius = 0;       // common orthogonal circle
  Vec4 u = Vec4::Zero(), v = Vec4::Zero();    // orthonormal basis of P
  Vec4 n1 = Vec4::Zero(), n2 = Vec4::Zero();  // orthonormal basis of P^perp
  double edge = 0;         // side length of the square
  /// Polars of the Gamma_j spheres as columns.
  Eigen::Matrix<double, 6, 4> span;
  std::vector<double> orthogonality;  // |Q(circle sphere, s_i)| per sphere
  double planarity = 0;               // max distance of a center from P

  /// Sphere of radius `radius` about `center`; it contains the circle.
  InversiveSphere circle_sphere() const;
  /// Translation to the center, unit scale.
  Frame frame() const { return Frame{center, 1.0}; }
};

/// Throws std::out_of_range for a missing amalgam and BendingError when the
/// spheres have no common orthogonal circle within 1e-9.
BendingLocus bending_locus(const ReflectionGroup& g, int j);

/// Euclidean action of E_t.
Vec4 bend_point(const BendingLocus& l, double t, const Vec4& x);
InversiveSphere bend_sphere(const BendingLocus& l, double t, const InversiveSphere& s);

/// E_t in global coordinates, and in the coordinates of frame f.
MobiusMap bending_rotation(const BendingLocus& l, double t);
MobiusMap bending_rotation(const BendingLocus& l, double t, const Frame& f);

/// max over Gamma_j of ||E_t R E_t^-1 - R||, each in a frame fitted to the
/// sphere.
double commutation_residual(const ReflectionGroup& g, const BendingLocus& l, double t);

struct BentRepresentation {
  double t = 0;
  BendingLocus locus;
  const ReflectionGroup* base = nullptr;
  /// true for generators conjugated by E_t (host chain index above j,
  /// outside Gamma_j).
  std::vector<bool> moved;
  /// Generator images: spheres and reflections of the bent group.
  ReflectionGroup group;
  RelationReport relations;

  const std::vector<MobiusMap>& images() const { return group.reflections; }
};

/// Throws BendingError naming the first failing relation when a Coxeter
/// residual exceeds 1e-8.
BentRepresentation bend(const ReflectionGroup& g, int j, double t);

/// Largest |eigenvalue| of the image of w, evaluated in a frame fitted to
/// the letters of w.
double word_lambda(const ReflectionGroup& g, const Word& w);

struct CrossingWitness {
  Word word;            // R_a R_b, a fixed, b moved, disjoint spheres
  double lambda0 = 0;   // at t = 0
  double lambda_t = 0;  // at the probe angle
  double probe = 0;
};

/// Among moved and unmoved generators nearest the circle and centered off P
/// (those on P commute with E_t), the disjoint pair
/// whose product changes its dominant eigenvalue most at the probe angle.
CrossingWitness crossing_witness(const ReflectionGroup& g, const BendingLocus& l,
                                 double probe, int candidates = 24);

struct BendingSweep {
  int j = 0;
  std::vector<double> angles;
  std::vector<double> relation_residual;  // per angle
  std::vector<double> commutation;        // per angle
  double max_relation = 0, max_commutation = 0;
  CrossingWitness witness;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Relations and commutation at every angle, plus a crossing witness at the
/// probe.  Failures are collected rather than thrown.
BendingSweep bending_sweep(const ReflectionGroup& g, int j,
                           const std::vector<double>& angles, double probe);

/// Columnar dump: a "# t j" header, then one line per generator with its
/// index, a moved flag and the 36 matrix entries in row-major order.
/// `gens` restricts the lines (empty = every generator).
void write_bent(std::ostream& out, const BentRepresentation& b,
                const std::vector<int>& gens = {});

}  // namespace wildknot
