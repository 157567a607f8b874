#include "wildknot/bending.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wildknot {

namespace {

constexpr double kTolCircle = 1e-9;
constexpr double kTolRelation = 1e-8;

// Gram-Schmidt step; returns false when x is dependent on the basis.
bool extend_basis(std::vector<Vec4>& basis, Vec4 x) {
  for (const auto& b : basis) x -= x.dot(b) * b;
  const double n = x.norm();
  if (n < 1e-9) return false;
  basis.push_back(x / n);
  return true;
}

Eigen::Matrix4d rotation_matrix(const BendingLocus& l, double t) {
  const double c = std::cos(t), s = std::sin(t);
  return Eigen::Matrix4d::Identity() +
         (c - 1) * (l.n1 * l.n1.transpose() + l.n2 * l.n2.transpose()) +
         s * (l.n2 * l.n1.transpose() - l.n1 * l.n2.transpose());
}

double lambda_of(const std::vector<InversiveSphere>& letters) {
  if (letters.empty()) return 1.0;
  Vec4 lo = letters[0].center(), hi = lo;
  double r = 0;
  for (const auto& s : letters) {
    lo = lo.cwiseMin(s.center());
    hi = hi.cwiseMax(s.center());
    r = std::max(r, s.radius());
  }
  const Frame f{0.5 * (lo + hi), r};
  MobiusMap m;
  for (const auto& s : letters) m = m * MobiusMap::reflection(f.to_local(s));
  return spectral_radius(m);
}

BentRepresentation make_bent(const ReflectionGroup& g, const BendingLocus& l, double t) {
  BentRepresentation b;
  b.t = t;
  b.locus = l;
  b.base = &g;
  b.group = g;
  b.moved.assign(g.size(), false);
  const MobiusMap e = bending_rotation(l, t);
  const MobiusMap ei = bending_rotation(l, -t);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.host[i] <= l.j) continue;
    if (std::find(l.gamma.begin(), l.gamma.end(), static_cast<int>(i)) != l.gamma.end())
      continue;
    b.moved[i] = true;
    b.group.spheres[i] = bend_sphere(l, t, g.spheres[i]);
    b.group.reflections[i] = e * g.reflections[i] * ei;
  }
  b.relations = coxeter_suite(b.group);
  return b;
}

}  // namespace

InversiveSphere BendingLocus::circle_sphere() const {
  return InversiveSphere::from_center_radius(center, radius);
}

BendingLocus bending_locus(const ReflectionGroup& g, int j) {
  if (j < 0 || static_cast<std::size_t>(j) >= g.amalgams.size())
    throw std::out_of_range("bending_locus: amalgam " + std::to_string(j) +
                            " does not exist");
  BendingLocus l;
  l.j = j;
  l.gamma = g.amalgams[j];
  const std::size_t n = l.gamma.size();
  if (n < 3) throw BendingError("bending_locus: amalgam has fewer than three spheres");

  for (int i : l.gamma) l.center += g.spheres[i].center();
  l.center /= static_cast<double>(n);

  std::vector<Vec4> basis;
  for (int i : l.gamma)
    if (basis.size() < 2) extend_basis(basis, g.spheres[i].center() - l.center);
  if (basis.size() < 2) throw BendingError("bending_locus: sphere centers are collinear");
  l.u = basis[0];
  l.v = basis[1];
  for (int d = 0; d < 4 && basis.size() < 4; ++d) extend_basis(basis, Vec4::Unit(d));
  l.n1 = basis[2];
  l.n2 = basis[3];

  double rho2 = 0;
  for (int i : l.gamma) {
    const Vec4 d = g.spheres[i].center() - l.center;
    l.planarity = std::max(l.planarity, std::hypot(d.dot(l.n1), d.dot(l.n2)));
    rho2 += d.squaredNorm() - g.spheres[i].radius() * g.spheres[i].radius();
  }
  rho2 /= static_cast<double>(n);
  if (!(rho2 > 0)) throw BendingError("bending_locus: spheres cover the square center");
  l.radius = std::sqrt(rho2);
  l.edge = (g.spheres[l.gamma[0]].center() - g.spheres[l.gamma[1]].center()).norm();

  const InversiveSphere so = l.circle_sphere();
  double worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    l.orthogonality.push_back(std::abs(inversive_product(so, g.spheres[l.gamma[k]])));
    worst = std::max(worst, l.orthogonality.back());
  }
  worst = std::max(worst, l.planarity);
  if (worst > kTolCircle) {
    std::ostringstream os;
    os << "bending_locus: no common orthogonal circle for amalgam " << j
       << " (residual " << worst << ")";
    throw BendingError(os.str());
  }
  if (n == 4)
    for (int k = 0; k < 4; ++k) l.span.col(k) = g.spheres[l.gamma[k]].polar();
  return l;
}

Vec4 bend_point(const BendingLocus& l, double t, const Vec4& x) {
  return l.center + rotation_matrix(l, t) * (x - l.center);
}

InversiveSphere bend_sphere(const BendingLocus& l, double t, const InversiveSphere& s) {
  return InversiveSphere::from_center_radius(bend_point(l, t, s.center()), s.radius());
}

MobiusMap bending_rotation(const BendingLocus& l, double t, const Frame& f) {
  Mat6 r = Mat6::Identity();
  r.topLeftCorner<4, 4>() = rotation_matrix(l, t);
  const MobiusMap shift = Frame{f.to_local(l.center), 1.0}.map();
  return shift.inverse() * MobiusMap(r) * shift;
}

MobiusMap bending_rotation(const BendingLocus& l, double t) {
  return bending_rotation(l, t, Frame{});
}

double commutation_residual(const ReflectionGroup& g, const BendingLocus& l, double t) {
  double worst = 0;
  for (int i : l.gamma) {
    const Frame f{g.spheres[i].center(), g.spheres[i].radius()};
    const MobiusMap r = MobiusMap::reflection(f.to_local(g.spheres[i]));
    const MobiusMap c =
        bending_rotation(l, t, f) * r * bending_rotation(l, -t, f);
    worst = std::max(worst, max_abs(c.matrix() - r.matrix()));
  }
  return worst;
}

BentRepresentation bend(const ReflectionGroup& g, int j, double t) {
  BentRepresentation b = make_bent(g, bending_locus(g, j), t);
  if (!b.relations.failures.empty())
    throw BendingError("bend: relation fails: " + b.relations.failures.front());
  if (b.relations.max_residual > kTolRelation)
    throw BendingError("bend: relation residual above tolerance");
  return b;
}

double word_lambda(const ReflectionGroup& g, const Word& w) {
  std::vector<InversiveSphere> letters;
  for (int k : w) letters.push_back(g.spheres[k]);
  return lambda_of(letters);
}

CrossingWitness crossing_witness(const ReflectionGroup& g, const BendingLocus& l,
                                 double probe, int candidates) {
  std::vector<int> fixed, moved;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::find(l.gamma.begin(), l.gamma.end(), static_cast<int>(i)) != l.gamma.end())
      continue;
    // Spheres centered on P commute with E_t and cannot detect the bend.
    const Vec4 d = g.spheres[i].center() - l.center;
    if (std::hypot(d.dot(l.n1), d.dot(l.n2)) < 1e-9) continue;
    (g.host[i] <= l.j ? fixed : moved).push_back(static_cast<int>(i));
  }
  auto nearest = [&](std::vector<int>& v) {
    auto dist = [&](int i) { return (g.spheres[i].center() - l.center).squaredNorm(); };
    std::stable_sort(v.begin(), v.end(), [&](int a, int b) { return dist(a) < dist(b); });
    if (v.size() > static_cast<std::size_t>(candidates)) v.resize(candidates);
  };
  nearest(fixed);
  nearest(moved);

  CrossingWitness best;
  best.probe = probe;
  double gap = -1;
  for (int a : fixed)
    for (int b : moved) {
      if (g.order(a, b) != 0) continue;
      const double l0 = lambda_of({g.spheres[a], g.spheres[b]});
      const double lt = lambda_of({g.spheres[a], bend_sphere(l, probe, g.spheres[b])});
      if (std::abs(lt - l0) > gap) {
        gap = std::abs(lt - l0);
        best.word = {a, b};
        best.lambda0 = l0;
        best.lambda_t = lt;
      }
    }
  return best;
}

BendingSweep bending_sweep(const ReflectionGroup& g, int j,
                           const std::vector<double>& angles, double probe) {
  BendingSweep s;
  s.j = j;
  s.angles = angles;
  const BendingLocus l = bending_locus(g, j);
  for (double t : angles) {
    const BentRepresentation b = make_bent(g, l, t);
    const double c = commutation_residual(g, l, t);
    s.relation_residual.push_back(b.relations.max_residual);
    s.commutation.push_back(c);
    s.max_relation = std::max(s.max_relation, b.relations.max_residual);
    s.max_commutation = std::max(s.max_commutation, c);
    std::ostringstream os;
    os << "t=" << t << ": ";
    if (!b.relations.failures.empty())
      s.failures.push_back(os.str() + b.relations.failures.front());
    else if (b.relations.max_residual > kTolRelation)
      s.failures.push_back(os.str() + "relation residual above tolerance");
    if (c > kTolCircle) s.failures.push_back(os.str() + "commutation residual above tolerance");
  }
  s.witness = crossing_witness(g, l, probe);
  if (s.witness.word.empty())
    s.failures.push_back("no disjoint pair crosses the amalgam");
  else if (std::abs(s.witness.lambda_t - s.witness.lambda0) <= 1e-4)
    s.failures.push_back("dominant eigenvalue does not vary with the angle");
  return s;
}

void write_bent(std::ostream& out, const BentRepresentation& b,
                const std::vector<int>& gens) {
  out << "# t " << std::setprecision(17) << b.t << " j " << b.locus.j << "\n";
  out << "# gen moved m00..m55\n";
  std::vector<int> all = gens;
  if (all.empty())
    for (std::size_t i = 0; i < b.group.size(); ++i) all.push_back(static_cast<int>(i));
  for (int i : all) {
    out << i << ' ' << (b.moved[i] ? 1 : 0);
    const Mat6& m = b.group.reflections[i].matrix();
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) out << ' ' << m(r, c);
    out << '\n';
  }
}

}  // namespace wildknot
