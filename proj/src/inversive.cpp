#include "wildknot/inversive.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace wildknot {

const Mat6& form_matrix() {
  static const Mat6 j = [] {
    Mat6 m = Mat6::Identity();
    m(5, 5) = -1.0;
    return m;
  }();
  return j;
}

double max_abs(const Mat6& m) { return m.cwiseAbs().maxCoeff(); }

Mat6 lorentz_project(const Mat6& m) {
  const Mat6& j = form_matrix();
  const Mat6 e = m.transpose() * j * m - j;
  return m - 0.5 * m * (j * e);
}

CausalType causal_type(const Vec6& x) {
  const double n = x.norm();
  if (n == 0.0) throw std::invalid_argument("causal_type: zero vector");
  const double q = lorentz(x, x) / (n * n);
  if (std::abs(q) <= kTolLight) return CausalType::Lightlike;
  return q > 0 ? CausalType::Spacelike : CausalType::Timelike;
}

// ---------------------------------------------------------------- IdealPoint

IdealPoint IdealPoint::infinity() {
  Vec6 v;
  v << 0, 0, 0, 0, 1, 1;
  return IdealPoint(v, true);
}

IdealPoint IdealPoint::from_lift(const Vec6& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw std::invalid_argument("IdealPoint: degenerate lift");
  if (std::abs(lorentz(v, v)) > 1e-8 * n * n)
    throw std::invalid_argument("IdealPoint: lift is not lightlike");
  if (v[5] < 0.0)
    throw std::invalid_argument("IdealPoint: lift on the negative cone");
  const double s = v[5] - v[4];
  if (std::abs(s) <= 1e-15 * n) return infinity();
  const Vec4 p = v.head<4>() / s;
  if (!p.allFinite()) return infinity();
  return lift_point(p);
}

Vec4 IdealPoint::euclidean() const {
  if (infinite_) throw std::domain_error("IdealPoint: point at infinity");
  return lift_.head<4>();
}

IdealPoint lift_point(const Vec4& p) {
  if (!p.allFinite())
    throw std::invalid_argument("lift_point: non-finite coordinates");
  const double n2 = p.squaredNorm();
  Vec6 v;
  v << p[0], p[1], p[2], p[3], 0.5 * (n2 - 1.0), 0.5 * (n2 + 1.0);
  return IdealPoint(v, false);
}

// ----------------------------------------------------------- InversiveSphere

InversiveSphere::InversiveSphere(const Vec6& v) : polar_(v) {
  const double s = v[5] - v[4];
  plane_ = std::abs(s) <= 1e-13 * v.norm();
  if (!plane_) {
    center_ = v.head<4>() / s;
    radius_ = 1.0 / std::abs(s);
  }
}

InversiveSphere InversiveSphere::from_center_radius(const Vec4& c, double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("sphere radius must be positive and finite");
  if (!c.allFinite())
    throw std::invalid_argument("sphere center must be finite");
  const double k = c.squaredNorm() - r * r;
  Vec6 v;
  v << c[0] / r, c[1] / r, c[2] / r, c[3] / r, (k - 1.0) / (2.0 * r),
      (k + 1.0) / (2.0 * r);
  InversiveSphere s(v);
  s.plane_ = false;
  s.center_ = c;
  s.radius_ = r;
  return s;
}

InversiveSphere InversiveSphere::from_hyperplane(const Vec4& normal,
                                                 double offset) {
  const double n = normal.norm();
  if (!(n > 0.0) || !std::isfinite(n) || !std::isfinite(offset))
    throw std::invalid_argument("hyperplane needs a nonzero finite normal");
  Vec6 v;
  v << normal / n, offset / n, offset / n;
  return InversiveSphere(v);
}

InversiveSphere InversiveSphere::from_polar(const Vec6& v) {
  const double n = v.norm();
  const double q = lorentz(v, v);
  if (!(n > 0.0) || !(q > 1e-12 * n * n))
    throw std::invalid_argument("polar vector is not spacelike");
  return InversiveSphere(v / std::sqrt(q));
}

bool InversiveSphere::is_plane() const { return plane_; }

bool InversiveSphere::bounded_interior() const {
  return !is_plane() && polar_[5] - polar_[4] > 0.0;
}

Vec4 InversiveSphere::center() const {
  if (is_plane()) throw std::domain_error("hyperplane has no center");
  return center_;
}

double InversiveSphere::radius() const {
  if (is_plane()) throw std::domain_error("hyperplane has no radius");
  return radius_;
}

Vec4 InversiveSphere::normal() const {
  if (!is_plane()) throw std::domain_error("not a hyperplane");
  return polar_.head<4>();
}

double InversiveSphere::offset() const {
  if (!is_plane()) throw std::domain_error("not a hyperplane");
  return 0.5 * (polar_[4] + polar_[5]);
}

IdealPoint InversiveSphere::sample_point() const {
  if (is_plane()) return lift_point(normal() * offset());
  return lift_point(center() + Vec4(radius(), 0, 0, 0));
}

// ----------------------------------------------------------------- MobiusMap

MobiusMap MobiusMap::reflection(const InversiveSphere& s) {
  const Vec6& v = s.polar();
  Vec6 jv = v;
  jv[5] = -jv[5];
  return MobiusMap(Mat6::Identity() - 2.0 * v * jv.transpose());
}

MobiusMap MobiusMap::inverse() const {
  const Mat6& j = form_matrix();
  return MobiusMap(j * m_.transpose() * j);
}

IdealPoint MobiusMap::apply(const IdealPoint& p) const {
  return IdealPoint::from_lift(m_ * p.lift());
}

InversiveSphere MobiusMap::apply(const InversiveSphere& s) const {
  return InversiveSphere::from_polar(m_ * s.polar());
}

double MobiusMap::form_drift() const {
  const Mat6& j = form_matrix();
  return max_abs(m_.transpose() * j * m_ - j);
}

double MobiusMap::distance_to_identity() const {
  return max_abs(m_ - Mat6::Identity());
}

bool MobiusMap::orthochronous() const {
  static const Vec4 samples[] = {Vec4(0, 0, 0, 0), Vec4(1, 0, 0, 0),
                                 Vec4(0, -2, 0, 0), Vec4(1, 2, 3, 4),
                                 Vec4(-0.5, 0.25, 7, -3)};
  if (!(m_(5, 5) > 0.0)) return false;
  Vec6 inf;
  inf << 0, 0, 0, 0, 1, 1;
  if (!((m_ * inf)[5] > 0.0)) return false;
  for (const auto& p : samples)
    if (!((m_ * lift_point(p).lift())[5] > 0.0)) return false;
  return true;
}

// -------------------------------------------------------- pair configuration

double inversive_product(const InversiveSphere& a, const InversiveSphere& b) {
  if (a.is_plane() || b.is_plane()) return lorentz(a.polar(), b.polar());
  const double r1 = a.radius(), r2 = b.radius();
  const double d2 = (a.center() - b.center()).squaredNorm();
  const double sign = (a.bounded_interior() == b.bounded_interior()) ? 1.0 : -1.0;
  return sign * ((r1 - r2) * (r1 - r2) + 2 * r1 * r2 - d2) / (2 * r1 * r2);
}

PairConfiguration pair_configuration(const InversiveSphere& a,
                                     const InversiveSphere& b) {
  const Vec6& u = a.polar();
  const Vec6& v = b.polar();
  const double scale = std::max({1.0, u.norm(), v.norm()});
  if ((u - v).norm() <= 1e-9 * scale || (u + v).norm() <= 1e-9 * scale)
    throw std::invalid_argument("pair_configuration: identical spheres");

  const double c = inversive_product(a, b);
  if (std::abs(std::abs(c) - 1.0) <= 1e-12) return Tangent{};
  if (std::abs(c) < 1.0) return Intersecting{std::acos(-c)};

  const bool a_in_b = b.contains(a.sample_point());
  const bool b_in_a = a.contains(b.sample_point());
  const double delta = std::abs(c);
  if (a_in_b && !b_in_a) return Nested{true, delta};
  if (b_in_a && !a_in_b) return Nested{false, delta};
  // Either interiors are disjoint, or (reversed orientations) the exteriors
  // are; both are reported as exterior-disjoint.
  return DisjointExterior{delta};
}

std::string describe(const PairConfiguration& c) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Intersecting>)
          os << "intersecting(" << x.angle << ")";
        else if constexpr (std::is_same_v<T, Tangent>)
          os << "tangent";
        else if constexpr (std::is_same_v<T, DisjointExterior>)
          os << "disjoint(" << x.inversive_distance << ")";
        else
          os << "nested(" << (x.first_inside_second ? "first" : "second")
             << " inside, " << x.inversive_distance << ")";
      },
      c);
  return os.str();
}

// -------------------------------------------------------------- frames

InversiveSphere Frame::to_local(const InversiveSphere& s) const {
  if (s.is_plane())
    return InversiveSphere::from_hyperplane(s.normal(),
                                            (s.offset() - s.normal().dot(origin)) / scale);
  auto t = InversiveSphere::from_center_radius(to_local(s.center()),
                                               s.radius() / scale);
  return s.bounded_interior() ? t : t.reversed();
}

InversiveSphere Frame::to_global(const InversiveSphere& s) const {
  if (s.is_plane())
    return InversiveSphere::from_hyperplane(s.normal(),
                                            s.offset() * scale + s.normal().dot(origin));
  auto t = InversiveSphere::from_center_radius(to_global(s.center()),
                                               s.radius() * scale);
  return s.bounded_interior() ? t : t.reversed();
}

MobiusMap Frame::map() const {
  MobiusMap shift;
  const double o = origin.norm();
  if (o > 0) {
    const Vec4 n = origin / o;
    shift = MobiusMap::reflection(InversiveSphere::from_hyperplane(n, -0.5 * o)) *
            MobiusMap::reflection(InversiveSphere::from_hyperplane(n, 0.0));
  }
  const MobiusMap dilate =
      MobiusMap::reflection(
          InversiveSphere::from_center_radius(Vec4::Zero(), 1.0 / std::sqrt(scale))) *
      MobiusMap::reflection(InversiveSphere::from_center_radius(Vec4::Zero(), 1.0));
  return dilate * shift;
}

InversiveSphere invert_sphere(const InversiveSphere& mirror,
                              const InversiveSphere& s) {
  if (mirror.is_plane() || s.is_plane())
    return MobiusMap::reflection(mirror).apply(s);
  const Vec4 C = mirror.center();
  const double R = mirror.radius();
  const Vec4 dc = s.center() - C;
  const double rho = s.radius();
  const double den = dc.squaredNorm() - rho * rho;
  if (std::abs(den) <= 1e-14 * (dc.squaredNorm() + rho * rho))
    return MobiusMap::reflection(mirror).apply(s);  // image is a hyperplane
  const double k = R * R / den;
  auto t = InversiveSphere::from_center_radius(C + k * dc, std::abs(k) * rho);
  // Inversion keeps the interior bounded iff the mirror center lies outside s.
  const bool bounded = s.bounded_interior() == (den > 0);
  return bounded ? t : t.reversed();
}

// ------------------------------------------------------------ classification

double spectral_radius(const MobiusMap& m) {
  Eigen::EigenSolver<Mat6> es(m.matrix(), false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Dominant eigenpair of a; the residual is relative to the eigenvalue.
struct TopEigen {
  std::complex<double> value;
  Vec6 vector;
  double residual;
};

TopEigen top_eigen(const Mat6& a) {
  Eigen::EigenSolver<Mat6> es(a, true);
  const auto& ev = es.eigenvalues();
  int top = 0;
  for (int i = 1; i < 6; ++i)
    if (std::abs(ev[i]) > std::abs(ev[top])) top = i;
  Vec6 v = es.eigenvectors().col(top).real();
  if (v[5] < 0) v = -v;  // eigenvectors come with an arbitrary sign
  const double res =
      (a * v - ev[top].real() * v).norm() / (v.norm() * std::abs(ev[top]));
  return {ev[top], v, res};
}

}  // namespace

MapClass classify_map(const MobiusMap& m) {
  if (m.distance_to_identity() <= kTolIdentity) return MapIdentity{};

  const Mat6& a = m.matrix();
  const TopEigen fwd = top_eigen(a);
  const double lambda = std::abs(fwd.value);

  if (lambda > 1.0 + kTolLoxodromic) {
    if (std::abs(fwd.value.imag()) > 1e-9 * lambda)
      return MapIndeterminate{std::abs(fwd.value.imag())};
    // The repelling point is the attracting point of the inverse J M^T J;
    // taking it from the small eigenvalue of M would lose all digits when
    // the dilation is large.
    const TopEigen back = top_eigen(m.inverse().matrix());
    const double res = std::max(fwd.residual, back.residual);
    if (!(res <= 1e-6)) return MapIndeterminate{res};
    try {
      return MapLoxodromic{IdealPoint::from_lift(fwd.vector),
                           IdealPoint::from_lift(back.vector), lambda};
    } catch (const std::invalid_argument&) {
      return MapIndeterminate{res};
    }
  }

  // All eigenvalues on the unit circle: elliptic iff a timelike vector is
  // fixed (a fixed point in hyperbolic 5-space), otherwise parabolic.
  Eigen::JacobiSVD<Mat6> svd(a - Mat6::Identity(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = 1e-7 * std::max(1.0, max_abs(a));
  int k = 0;
  for (int i = 0; i < 6; ++i)
    if (sv[i] <= cut) ++k;
  if (k == 0) return MapIndeterminate{sv.minCoeff()};
  const Eigen::MatrixXd basis = svd.matrixV().rightCols(k);
  const Eigen::MatrixXd gram = basis.transpose() * form_matrix() * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ge(gram);
  if (ge.eigenvalues().minCoeff() < -1e-9) return MapElliptic{};
  return MapParabolic{};
}

}  // namespace wildknot
