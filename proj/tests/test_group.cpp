#include "support.hpp"
#include "wildknot/group.hpp"

#include <doctest.h>

#include <cmath>

using namespace wildknot;

namespace {

struct Spec {
  Vec4 c;
  double r;
};

/// Group on the given spheres; pairs meeting at pi/m get their order m.
ReflectionGroup group_of(const std::vector<Spec>& specs) {
  ReflectionGroup g;
  for (const auto& s : specs) {
    g.spheres.push_back(InversiveSphere::from_center_radius(s.c, s.r));
    g.reflections.push_back(MobiusMap::reflection(g.spheres.back()));
    g.host.push_back(0);
  }
  g.finite.assign(specs.size(), {});
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = 0; j < specs.size(); ++j) {
      if (i == j) continue;
      const double c = testkit::exterior_cos({specs[i].c, specs[i].r}, {specs[j].c, specs[j].r});
      for (int m : {2, 3})
        if (std::abs(c - std::cos(M_PI / m)) < 1e-12)
          g.finite[i].emplace_back(static_cast<int>(j), m);
    }
  g.blocks = {{}};
  for (std::size_t i = 0; i < specs.size(); ++i) g.blocks[0].push_back(static_cast<int>(i));
  return g;
}

/// Unit spheres on the x1 axis at distance d.
ReflectionGroup pair_at(double d) { return group_of({{Vec4::Zero(), 1}, {Vec4(d, 0, 0, 0), 1}}); }

}  // namespace

TEST_CASE("word utilities") {
  CHECK(format_word({}) == "e");
  CHECK(format_word({3, 0, 12}) == "3.0.12");
  CHECK(is_reduced({1, 2, 1}));
  CHECK_FALSE(is_reduced({1, 1}));
  CHECK(shortlex_less({5}, {0, 1}));
  CHECK(shortlex_less({0, 2}, {1, 0}));
  CHECK_FALSE(shortlex_less({1, 0}, {1, 0}));
}

TEST_CASE("finite dihedral groups have the right order") {
  SUBCASE("pi/3 gives order 6") {
    const auto g = pair_at(std::sqrt(3.0));
    CHECK(g.order(0, 1) == 3);
    const auto e = enumerate_words(g, {}, 10);
    CHECK(e.elements.size() == 6);
    CHECK(e.duplicates > 0);
  }
  SUBCASE("pi/2 gives order 4") {
    const auto g = pair_at(std::sqrt(2.0));
    CHECK(g.order(0, 1) == 2);
    CHECK(enumerate_words(g, {}, 10).elements.size() == 4);
  }
}

TEST_CASE("infinite dihedral group has 2L+1 elements of length <= L") {
  const auto g = pair_at(3.0);
  CHECK(g.order(0, 1) == 0);
  for (int L : {0, 1, 4, 9}) {
    const auto e = enumerate_words(g, {}, L);
    CHECK(e.elements.size() == static_cast<std::size_t>(2 * L + 1));
    CHECK(e.duplicates == 0);
  }
  const auto e0 = enumerate_words(g, {}, 0);
  REQUIRE(e0.elements.size() == 1);
  CHECK(e0.elements[0].word.empty());
  CHECK(e0.elements[0].map.distance_to_identity() < 1e-15);
}

TEST_CASE("enumeration is in canonical order with shortlex-least words") {
  const auto g = pair_at(std::sqrt(3.0));
  const auto e = enumerate_words(g, {}, 6);
  for (std::size_t i = 1; i < e.elements.size(); ++i)
    CHECK(shortlex_less(e.elements[i - 1].word, e.elements[i].word));
  // The longest element of the order-6 group: 0.1.0 == 1.0.1.
  CHECK(format_word(e.elements.back().word) == "0.1.0");
}

TEST_CASE("Tits representation satisfies the Coxeter relations exactly") {
  // Triangle: 0-1 at pi/3, 1-2 at pi/2, 0-2 disjoint.
  const auto g = group_of({{Vec4::Zero(), 1},
                           {Vec4(std::sqrt(3.0), 0, 0, 0), 1},
                           {Vec4(std::sqrt(3.0), std::sqrt(2.0), 0, 0), 1}});
  REQUIRE(g.order(0, 1) == 3);
  REQUIRE(g.order(1, 2) == 2);
  REQUIRE(g.order(0, 2) == 0);
  TitsRepresentation t(g, {0, 1, 2});
  const auto I = t.identity();
  CHECK(t.evaluate({0, 0}) == I);
  CHECK(t.evaluate({0, 1, 0, 1, 0, 1}) == I);
  CHECK(t.evaluate({1, 2, 1, 2}) == I);
  CHECK(t.evaluate({0, 1}) != I);
  Word w;
  for (int k = 1; k <= 20; ++k) {
    w.push_back(0);
    w.push_back(2);
    CHECK(t.evaluate(w) != I);
  }
  CHECK(t.local(2) == 2);
  CHECK(t.local(7) == -1);
}

TEST_CASE("word maps match successive Euclidean inversions") {
  const auto& g = testkit::dumbbell_group();
  const auto& cov = testkit::dumbbell_cover();
  const auto gens = face_patch(cov, 11);
  REQUIRE(gens.size() == 9);
  const Frame f = fit_frame(g, gens);
  testkit::Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Word w;
    const int len = rng.integer(1, 5);
    while (static_cast<int>(w.size()) < len) {
      const int a = gens[rng.integer(0, 8)];
      if (w.empty() || w.back() != a) w.push_back(a);
    }
    const Vec4 p = g.spheres[gens[0]].center() + rng.point(3.0);
    Vec4 q = p;
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      q = testkit::invert_point(g.spheres[*it].center(), g.spheres[*it].radius(), q);
    const Vec4 got = f.to_global(word_map(g, w, f).apply(lift_point(f.to_local(p))).euclidean());
    CHECK((got - q).norm() <= 1e-8 * (1 + q.norm()));
  }
}

TEST_CASE("Coxeter relations hold on the dumbbell") {
  const auto& g = testkit::dumbbell_group();
  const auto rep = coxeter_suite(g);
  CHECK(rep.pairs == testkit::dumbbell_cover().adjacency.size());
  CHECK(rep.failures.empty());
  CHECK(rep.max_residual < 1e-10);
  CHECK(rep.min_lower_power > 0.5);
  CHECK(rep.ok());
}

TEST_CASE("assembled group mirrors the adjacency") {
  const auto& g = testkit::dumbbell_group();
  const auto& cov = testkit::dumbbell_cover();
  CHECK(g.size() == cov.balls.size());
  for (const auto& a : cov.adjacency) {
    CHECK(g.order(a.i, a.j) == a.m);
    CHECK(g.order(a.j, a.i) == a.m);
  }
  CHECK(g.order(0, 0) == 1);
  CHECK(g.amalgams.size() == cov.amalgam_rings.size());
}

TEST_CASE("a non-Coxeter angle is rejected") {
  auto cov = testkit::dumbbell_cover();
  cov.adjacency.front().m = 4;
  CHECK_THROWS_AS(assemble_group(cov), std::runtime_error);
}

TEST_CASE("faithfulness and drift on a face patch") {
  const auto& g = testkit::dumbbell_group();
  const auto gens = face_patch(testkit::dumbbell_cover(), 30);
  const auto rep = faithfulness_scan(g, gens, 5);
  CHECK(rep.ok());
  CHECK(rep.violations.empty());
  CHECK(rep.abstract_elements > 1000);
  CHECK(rep.min_gap > 0.1);
  const auto e = enumerate_words(g, gens, 5);
  CHECK(e.elements.size() == rep.abstract_elements);

  const auto d = drift_scan(g, gens, 5);
  // 9 generators: 9 + 9*8 + ... + 9*8^4 non-empty reduced words.
  CHECK(d.words == 9 + 72 + 576 + 4608 + 36864);
  CHECK(d.max_drift < 1e-9);
}

TEST_CASE("fundamental domain check on the dumbbell") {
  const auto rep = fundamental_domain_check(testkit::dumbbell_group(), 3000, 4);
  CHECK(rep.samples == 3000);
  CHECK(rep.generators == testkit::dumbbell_group().size());
  CHECK(rep.ok());
}
