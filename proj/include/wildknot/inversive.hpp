#pragma once

// Inversive geometry of S^4 = R^4 u {inf} in the Lorentz model R^{5,1}.
//
// Points of S^4 are rays on the positive light cone, round 3-spheres are unit
// spacelike "polar" vectors, and Mobius maps are 6x6 matrices preserving the
// form Q(x,y) = x1y1 + ... + x5y5 - x6y6.  Everything stays projective; the
// only place infinity needs special handling is the projection back to R^4.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>

namespace wildknot {

using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kTolLight = 1e-10;         // light-cone membership
inline constexpr double kTolConstruct = 1e-10;     // sphere normalization
inline constexpr double kTolForm = 1e-9;           // ||M^T J M - J||
inline constexpr double kTolIdentity = 1e-8;       // Identity classification
inline constexpr double kTolLoxodromic = 1e-6;     // lambda > 1 + tol

/// The Lorentz form Q(x, y).
inline double lorentz(const Vec6& x, const Vec6& y) {
  return x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3] + x[4] * y[4] -
         x[5] * y[5];
}

/// J = diag(1,1,1,1,1,-1).
const Mat6& form_matrix();

enum class CausalType { Spacelike, Lightlike, Timelike };

/// Sign of Q(x,x) after scaling x to unit Euclidean norm.
CausalType causal_type(const Vec6& x);

/// A point of S^4 stored as a lift on the positive light cone.
///
/// Finite points use the scaling x6 - x5 = 1, i.e. the lift of p is
/// (p, (|p|^2-1)/2, (|p|^2+1)/2); infinity is (0,0,0,0,1,1).
class IdealPoint {
 public:
  static IdealPoint infinity();
  /// Re-normalizes an arbitrary nonzero light-cone vector.  Throws when the
  /// vector is not (numerically) lightlike or lies on the negative cone.
  static IdealPoint from_lift(const Vec6& v);

  const Vec6& lift() const { return lift_; }
  bool is_infinity() const { return infinite_; }
  /// Euclidean coordinates; throws std::domain_error for infinity.
  Vec4 euclidean() const;

 private:
  friend IdealPoint lift_point(const Vec4& p);
  IdealPoint(const Vec6& v, bool inf) : lift_(v), infinite_(inf) {}
  Vec6 lift_;
  bool infinite_;
};

/// Rejects non-finite coordinates with std::invalid_argument.
IdealPoint lift_point(const Vec4& p);

/// Oriented round 3-sphere (or hyperplane) of S^4.
///
/// Orientation: the interior is {p : Q(lift(p), polar) > 0}.  For a metric
/// sphere built by from_center_radius the interior is the bounded ball, so
/// the center is interior.  Q(lift(p), polar) = (r^2 - |p-c|^2) / (2r).
class InversiveSphere {
 public:
  static InversiveSphere from_center_radius(const Vec4& center, double radius);
  /// Hyperplane {x : n.x = offset}; interior is the side n.x > offset.
  static InversiveSphere from_hyperplane(const Vec4& normal, double offset);
  /// Scales a spacelike vector to Q = 1, keeping its direction.
  static InversiveSphere from_polar(const Vec6& v);

  const Vec6& polar() const { return polar_; }

  bool is_plane() const;
  /// True when the interior is a bounded ball.
  bool bounded_interior() const;
  Vec4 center() const;   // metric spheres only
  double radius() const;  // metric spheres only
  Vec4 normal() const;    // hyperplanes only
  double offset() const;  // hyperplanes only

  double signed_power(const IdealPoint& p) const {
    return lorentz(p.lift(), polar_);
  }
  bool contains(const IdealPoint& p) const { return signed_power(p) > 0.0; }
  /// Same sphere with interior and exterior swapped.
  InversiveSphere reversed() const {
    InversiveSphere t = *this;
    t.polar_ = -polar_;
    return t;
  }
  /// Some point on the sphere.
  IdealPoint sample_point() const;

 private:
  explicit InversiveSphere(const Vec6& v);
  Vec6 polar_;
  // Metric data kept at full accuracy when the sphere was built from them;
  // recovering it from a polar with large entries loses digits.
  bool plane_ = false;
  Vec4 center_ = Vec4::Zero();
  double radius_ = 0.0;
};

/// Element of Mob(4) as a Lorentz matrix.
class MobiusMap {
 public:
  MobiusMap() : m_(Mat6::Identity()) {}
  explicit MobiusMap(const Mat6& m) : m_(m) {}

  static MobiusMap identity() { return MobiusMap(); }
  /// M = I - 2 v (J v)^T for the polar v.
  static MobiusMap reflection(const InversiveSphere& s);

  const Mat6& matrix() const { return m_; }

  MobiusMap operator*(const MobiusMap& o) const { return MobiusMap(m_ * o.m_); }
  /// J M^T J, exact for form-preserving matrices.
  MobiusMap inverse() const;

  IdealPoint apply(const IdealPoint& p) const;
  InversiveSphere apply(const InversiveSphere& s) const;

  /// ||M^T J M - J||_inf (max-abs entry).
  double form_drift() const;
  /// ||M - I||_inf (max-abs entry).
  double distance_to_identity() const;
  /// Maps the positive light cone to itself (checked on a fixed sample).
  bool orthochronous() const;

 private:
  Mat6 m_;
};

double max_abs(const Mat6& m);

/// First-order correction back onto O(5,1): M - M J (M^T J M - J) / 2.
/// Products of many reflections drift off the group roughly like
/// eps * ||M||^2 per step; applying this after each product keeps the drift
/// at the level of a single rounding.
Mat6 lorentz_project(const Mat6& m);

/// Euclidean similarity x -> (x - origin) / scale.  Products of reflections in
/// small spheres far from the origin have huge matrix entries; evaluating
/// them in a frame fitted to the spheres keeps the arithmetic well scaled.
struct Frame {
  Vec4 origin = Vec4::Zero();
  double scale = 1.0;

  Vec4 to_local(const Vec4& x) const { return (x - origin) / scale; }
  Vec4 to_global(const Vec4& x) const { return origin + scale * x; }
  InversiveSphere to_local(const InversiveSphere& s) const;
  InversiveSphere to_global(const InversiveSphere& s) const;
  /// The similarity as a Lorentz matrix (a product of four reflections).
  MobiusMap map() const;
};

/// Euclidean inversion of sphere s in the metric sphere `mirror`; equal to
/// MobiusMap::reflection(mirror).apply(s) but computed from centers and radii.
InversiveSphere invert_sphere(const InversiveSphere& mirror,
                              const InversiveSphere& s);

// Pair configurations.  The angle is the dihedral angle of the region outside
// both balls, so cos(theta) = -Q(u, v) = (d^2 - r1^2 - r2^2) / (2 r1 r2).
struct Intersecting {
  double angle;
};
struct Tangent {};
struct DisjointExterior {
  double inversive_distance;
};
struct Nested {
  bool first_inside_second;
  double inversive_distance;
};
using PairConfiguration =
    std::variant<Intersecting, Tangent, DisjointExterior, Nested>;

/// Q(u, v) for the two polars.  For metric spheres this is evaluated as
/// +-(r1^2 + r2^2 - d^2) / (2 r1 r2), which stays accurate far from the origin
/// where the polar entries are large.
double inversive_product(const InversiveSphere& a, const InversiveSphere& b);

/// Throws std::invalid_argument for (numerically) identical spheres.
PairConfiguration pair_configuration(const InversiveSphere& a,
                                     const InversiveSphere& b);

std::string describe(const PairConfiguration& c);

struct MapIdentity {};
struct MapElliptic {};
struct MapParabolic {};
struct MapLoxodromic {
  IdealPoint attracting;
  IdealPoint repelling;
  double dilation;  // > 1
};
struct MapIndeterminate {
  double residual;
};
using MapClass = std::variant<MapIdentity, MapElliptic, MapParabolic,
                              MapLoxodromic, MapIndeterminate>;

MapClass classify_map(const MobiusMap& m);

/// Largest absolute eigenvalue; for Lorentz matrices this is the dilation of
/// the loxodromic part (1 for elliptic and parabolic maps).
double spectral_radius(const MobiusMap& m);

}  // namespace wildknot
