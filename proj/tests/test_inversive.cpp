#include "support.hpp"
#include "wildknot/inversive.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace wildknot;
using testkit::Rng;

namespace {

InversiveSphere random_sphere(Rng& rng, double box = 5.0) {
  return InversiveSphere::from_center_radius(rng.point(box), rng.uniform(0.05, 2.0));
}

}  // namespace

TEST_CASE("lift and projection round trip") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Vec4 p = rng.point(50.0);
    const IdealPoint q = lift_point(p);
    CHECK(std::abs(lorentz(q.lift(), q.lift())) < 1e-9 * (1 + p.squaredNorm()));
    CHECK((q.euclidean() - p).norm() < 1e-12 * (1 + p.norm()));
  }
  CHECK(IdealPoint::infinity().is_infinity());
  CHECK_THROWS_AS(IdealPoint::infinity().euclidean(), std::domain_error);
  CHECK_THROWS_AS(lift_point(Vec4(std::nan(""), 0, 0, 0)), std::invalid_argument);
  Vec6 timelike = Vec6::Zero();
  timelike[5] = 1;
  CHECK_THROWS(IdealPoint::from_lift(timelike));
}

TEST_CASE("reflection matches Euclidean inversion") {
  Rng rng(12);
  for (int i = 0; i < 300; ++i) {
    const InversiveSphere s = random_sphere(rng);
    Vec4 p = rng.point(6.0);
    if ((p - s.center()).norm() < 1e-2) continue;
    const Vec4 got = MobiusMap::reflection(s).apply(lift_point(p)).euclidean();
    const Vec4 want = testkit::invert_point(s.center(), s.radius(), p);
    CHECK((got - want).norm() <= 1e-9 * (1 + want.norm()));
  }
}

TEST_CASE("reflection in a hyperplane mirrors coordinates") {
  const InversiveSphere h = InversiveSphere::from_hyperplane(Vec4(1, 0, 0, 0), 0.5);
  CHECK(h.is_plane());
  const Vec4 p(2, 1, -1, 3);
  const Vec4 q = MobiusMap::reflection(h).apply(lift_point(p)).euclidean();
  CHECK((q - Vec4(-1, 1, -1, 3)).norm() < 1e-12);
  CHECK(h.contains(lift_point(p)));
  CHECK_FALSE(h.contains(lift_point(Vec4(0, 0, 0, 0))));
}

TEST_CASE("reflections are involutions preserving the form") {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    const MobiusMap r = MobiusMap::reflection(random_sphere(rng, 2.0));
    const double scale = max_abs(r.matrix()) * max_abs(r.matrix());
    CHECK((r * r).distance_to_identity() < 1e-13 * scale);
    CHECK(r.form_drift() < 1e-13 * scale);
    CHECK(r.orthochronous());
  }
}

TEST_CASE("inverse is J M^T J") {
  Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    MobiusMap m;
    for (int k = 0; k < 4; ++k)
      m = m * MobiusMap::reflection(
                  InversiveSphere::from_center_radius(rng.point(1.0), rng.uniform(0.5, 2.0)));
    const Mat6 want = m.matrix().inverse();
    const double cond = max_abs(m.matrix()) * max_abs(want);
    CHECK(max_abs(m.inverse().matrix() - want) <= 1e-13 * cond * max_abs(want));
    CHECK((m.inverse() * m).distance_to_identity() <= 1e-13 * cond);
  }
}

TEST_CASE("sphere images agree with point images") {
  Rng rng(15);
  for (int i = 0; i < 200; ++i) {
    const InversiveSphere mirror = random_sphere(rng, 2.0);
    const InversiveSphere s = random_sphere(rng, 2.0);
    const double gap = std::abs((s.center() - mirror.center()).norm() - s.radius());
    if (gap < 0.1 * s.radius()) continue;  // s passes near the mirror center
    const InversiveSphere img = invert_sphere(mirror, s);
    const testkit::Ball want =
        testkit::invert_ball(mirror.center(), mirror.radius(), s.center(), s.radius());
    CHECK((img.center() - want.c).norm() <= 1e-9 * (1 + want.c.norm()));
    CHECK(std::abs(img.radius() - want.r) <= 1e-9 * (1 + want.r));
    const MobiusMap r = MobiusMap::reflection(mirror);
    const InversiveSphere viaq = r.apply(s);
    CHECK((viaq.center() - want.c).norm() <= 1e-8 * (1 + want.c.norm()));
    const double q = std::abs(inversive_product(s, mirror));
    const double cond = max_abs(r.matrix()) * max_abs(r.matrix());
    CHECK(std::abs(std::abs(inversive_product(viaq, mirror)) - q) <= 1e-11 * cond * (1 + q));
  }
}

TEST_CASE("pair configurations from centers and radii") {
  const double pi = std::numbers::pi;
  SUBCASE("pi/3 angle for unit spheres at distance sqrt 3") {
    const auto a = InversiveSphere::from_center_radius(Vec4::Zero(), 1);
    const auto b = InversiveSphere::from_center_radius(Vec4(std::sqrt(3.0), 0, 0, 0), 1);
    const auto cfg = pair_configuration(a, b);
    REQUIRE(std::holds_alternative<Intersecting>(cfg));
    CHECK(std::get<Intersecting>(cfg).angle == doctest::Approx(pi / 3).epsilon(1e-12));
  }
  SUBCASE("random intersecting pairs") {
    Rng rng(16);
    for (int i = 0; i < 300; ++i) {
      const testkit::Ball a{rng.point(1.0), rng.uniform(0.5, 1.5)};
      const testkit::Ball b{a.c + rng.direction() * rng.uniform(0.1, 3.0), rng.uniform(0.5, 1.5)};
      const double c = testkit::exterior_cos(a, b);
      if (std::abs(c) > 0.999) continue;
      const auto cfg = pair_configuration(InversiveSphere::from_center_radius(a.c, a.r),
                                          InversiveSphere::from_center_radius(b.c, b.r));
      REQUIRE(std::holds_alternative<Intersecting>(cfg));
      CHECK(std::get<Intersecting>(cfg).angle == doctest::Approx(std::acos(c)).epsilon(1e-9));
    }
  }
  SUBCASE("tangent, disjoint, nested, identical") {
    const auto a = InversiveSphere::from_center_radius(Vec4::Zero(), 1);
    CHECK(std::holds_alternative<Tangent>(
        pair_configuration(a, InversiveSphere::from_center_radius(Vec4(2, 0, 0, 0), 1))));
    const auto far = pair_configuration(a, InversiveSphere::from_center_radius(Vec4(4, 0, 0, 0), 1));
    REQUIRE(std::holds_alternative<DisjointExterior>(far));
    CHECK(std::get<DisjointExterior>(far).inversive_distance == doctest::Approx(7.0));
    const auto in = pair_configuration(InversiveSphere::from_center_radius(Vec4::Zero(), 0.5), a);
    REQUIRE(std::holds_alternative<Nested>(in));
    CHECK(std::get<Nested>(in).first_inside_second);
    CHECK(std::get<Nested>(in).inversive_distance == doctest::Approx(1.25));
    CHECK_THROWS_AS(pair_configuration(a, a), std::invalid_argument);
  }
}

TEST_CASE("dilation of two reflections matches the inversive distance") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const testkit::Ball a{rng.point(1.0), rng.uniform(0.2, 1.0)};
    const testkit::Ball b{a.c + rng.direction() * (a.r + rng.uniform(0.3, 2.0) + 1.0),
                          rng.uniform(0.2, 1.0)};
    const double delta = testkit::exterior_cos(a, b);
    if (delta < 1.01) continue;
    const auto sa = InversiveSphere::from_center_radius(a.c, a.r);
    const auto sb = InversiveSphere::from_center_radius(b.c, b.r);
    const MobiusMap h = MobiusMap::reflection(sa) * MobiusMap::reflection(sb);
    const double want = testkit::dilation_from_delta(delta);
    CHECK(spectral_radius(h) == doctest::Approx(want).epsilon(1e-8));
    const MapClass cls = classify_map(h);
    REQUIRE(std::holds_alternative<MapLoxodromic>(cls));
    const auto& lox = std::get<MapLoxodromic>(cls);
    CHECK(lox.dilation == doctest::Approx(want).epsilon(1e-8));
    // h maps the exterior of b into a, so its attracting point lies in a.
    const Vec4 p = lox.attracting.euclidean();
    CHECK((p - a.c).norm() < a.r);
    CHECK((h.apply(lox.attracting).euclidean() - p).norm() < 1e-7);
  }
  SUBCASE("concentric spheres scale by the squared radius ratio") {
    const auto inner = InversiveSphere::from_center_radius(Vec4::Zero(), 0.5);
    const auto outer = InversiveSphere::from_center_radius(Vec4::Zero(), 2.0);
    const MobiusMap h = MobiusMap::reflection(inner) * MobiusMap::reflection(outer);
    CHECK(spectral_radius(h) == doctest::Approx(16.0).epsilon(1e-10));
    const Vec4 p(1, 2, 0, 0);
    CHECK((h.apply(lift_point(p)).euclidean() - p / 16.0).norm() < 1e-12);
  }
}

TEST_CASE("classification of simple maps") {
  CHECK(std::holds_alternative<MapIdentity>(classify_map(MobiusMap::identity())));
  const auto a = InversiveSphere::from_center_radius(Vec4::Zero(), 1);
  const auto b = InversiveSphere::from_center_radius(Vec4(std::sqrt(3.0), 0, 0, 0), 1);
  const MobiusMap rot = MobiusMap::reflection(a) * MobiusMap::reflection(b);
  CHECK(std::holds_alternative<MapElliptic>(classify_map(rot)));
  CHECK(spectral_radius(rot) == doctest::Approx(1.0));
  const auto p1 = InversiveSphere::from_hyperplane(Vec4(1, 0, 0, 0), 0);
  const auto p2 = InversiveSphere::from_hyperplane(Vec4(1, 0, 0, 0), 1);
  const MobiusMap shift = MobiusMap::reflection(p2) * MobiusMap::reflection(p1);
  CHECK(std::holds_alternative<MapParabolic>(classify_map(shift)));
  CHECK((shift.apply(lift_point(Vec4(0.3, 1, 2, 3))).euclidean() - Vec4(2.3, 1, 2, 3)).norm() <
        1e-12);
}

TEST_CASE("frames are similarities") {
  Rng rng(18);
  for (int i = 0; i < 100; ++i) {
    const Frame f{rng.point(10.0), rng.uniform(0.1, 3.0)};
    const Vec4 p = rng.point(10.0);
    const Vec4 q = f.map().apply(lift_point(p)).euclidean();
    CHECK((q - f.to_local(p)).norm() < 1e-9 * (1 + q.norm()));
    const InversiveSphere s = random_sphere(rng);
    const InversiveSphere back = f.to_global(f.to_local(s));
    CHECK((back.center() - s.center()).norm() < 1e-12 * (1 + s.center().norm()));
    CHECK(back.radius() == doctest::Approx(s.radius()));
  }
}

TEST_CASE("projection removes form drift") {
  Rng rng(19);
  MobiusMap m;
  for (int k = 0; k < 6; ++k) m = m * MobiusMap::reflection(random_sphere(rng, 1.0));
  Mat6 noisy = m.matrix();
  noisy(0, 1) += 1e-7;
  noisy(3, 5) -= 2e-7;
  const double before = MobiusMap(noisy).form_drift();
  const double after = MobiusMap(lorentz_project(noisy)).form_drift();
  CHECK(after < before * 1e-3);
}

TEST_CASE("polar construction rejects timelike vectors") {
  Vec6 v = Vec6::Zero();
  v[5] = 1;
  CHECK_THROWS_AS(InversiveSphere::from_polar(v), std::invalid_argument);
  CHECK_THROWS(InversiveSphere::from_hyperplane(Vec4::Zero(), 1));
}
