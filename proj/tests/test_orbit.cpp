#include "support.hpp"
#include "wildknot/group.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

using namespace wildknot;

namespace {

/// disjoint[i]: generators whose balls are disjoint from ball i.
std::vector<std::vector<int>> disjoint_lists(const BallCover& cov) {
  const auto& b = cov.balls;
  std::vector<std::vector<int>> d(b.size());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j && (b[i].center - b[j].center).norm() > b[i].radius + b[j].radius)
        d[i].push_back(static_cast<int>(j));
  return d;
}

const std::vector<int> kRoots{0, 300};

OrbitLimits unbounded() {
  OrbitLimits lim;
  lim.max_generation = 2;
  lim.radius_floor = 1e-12;  // keeps every child
  lim.roots = kRoots;
  return lim;
}

const Orbit& dumbbell_orbit() {
  static const Orbit o = orbit_spheres(testkit::dumbbell_group(), unbounded());
  return o;
}

}  // namespace

TEST_CASE("orbit generation sizes follow the disjointness graph") {
  const auto d = disjoint_lists(testkit::dumbbell_cover());
  std::size_t g1 = 0, g2 = 0;
  for (int i : kRoots) {
    g1 += d[i].size();
    for (int j : d[i]) g2 += d[j].size();
  }
  const Orbit& o = dumbbell_orbit();
  CHECK(o.generation_size(0) == kRoots.size());
  CHECK(o.generation_size(1) == g1);
  CHECK(o.generation_size(2) == g2);
  CHECK(o.generation_size(3) == 0);
  CHECK_FALSE(o.truncated);
}

TEST_CASE("orbit spheres equal iterated Euclidean inversions") {
  const auto& g = testkit::dumbbell_group();
  const Orbit& o = dumbbell_orbit();
  testkit::Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const auto seq = static_cast<std::size_t>(rng.integer(0, static_cast<int>(o.spheres.size()) - 1));
    const OrbitSphere& s = o.spheres[seq];
    const Word w = o.word(seq);
    CHECK(static_cast<int>(w.size()) == s.generation);
    testkit::Ball want{g.spheres[s.base].center(), g.spheres[s.base].radius()};
    for (auto it = w.rbegin(); it != w.rend(); ++it)
      want = testkit::invert_ball(g.spheres[*it].center(), g.spheres[*it].radius(), want.c, want.r);
    CHECK((want.c - s.center).norm() < 1e-9);
    CHECK(std::abs(want.r - s.radius) < 1e-9 * want.r);
    if (s.parent >= 0) {
      const OrbitSphere& p = o.spheres[s.parent];
      CHECK((s.center - p.center).norm() + s.radius < p.radius);
    }
  }
}

TEST_CASE("nesting verification passes and catches corruption") {
  OrbitLimits lim;
  lim.max_generation = 3;
  lim.branch_cap = 3;
  const Orbit o = orbit_spheres(testkit::dumbbell_group(), lim);
  CHECK(o.generation_size(3) == 27 * o.generation_size(0));
  const auto rep = verify_nesting(o);
  CHECK(rep.ok());
  CHECK(rep.checked == o.spheres.size() - o.generation_size(0));
  REQUIRE(rep.max_radius.size() == 4);
  CHECK(rep.max_radius[3] < rep.max_radius[2]);
  CHECK(rep.max_radius[2] < rep.max_radius[1]);
  CHECK(rep.max_radius[1] < rep.max_radius[0]);

  SUBCASE("child escaping its parent") {
    Orbit bad = o;
    auto& s = bad.spheres[bad.generation_start[2] + 5];
    s.radius = 2 * bad.spheres[s.parent].radius;
    CHECK(verify_nesting(bad).violations > 0);
  }
  SUBCASE("duplicate sphere") {
    Orbit bad = o;
    const std::size_t a = bad.generation_start[1];
    bad.spheres[a + 1].center = bad.spheres[a].center;
    bad.spheres[a + 1].radius = bad.spheres[a].radius;
    CHECK(verify_nesting(bad).duplicates > 0);
  }
  SUBCASE("broken parent order") {
    Orbit bad = o;
    bad.spheres[bad.generation_start[1]].parent = static_cast<int>(bad.generation_start[1] + 3);
    CHECK(verify_nesting(bad).order_violations > 0);
  }
}

TEST_CASE("parallel and serial expansion agree exactly") {
  OrbitLimits lim = unbounded();
  lim.parallel = false;
  const Orbit s = orbit_spheres(testkit::dumbbell_group(), lim);
  const Orbit& p = dumbbell_orbit();
  REQUIRE(s.spheres.size() == p.spheres.size());
  bool same = true;
  for (std::size_t i = 0; i < s.spheres.size(); ++i)
    same = same && s.spheres[i].center == p.spheres[i].center &&
           s.spheres[i].radius == p.spheres[i].radius && s.spheres[i].parent == p.spheres[i].parent;
  CHECK(same);
}

TEST_CASE("orbit limits") {
  const auto& g = testkit::dumbbell_group();
  SUBCASE("unbounded expansion is refused") {
    OrbitLimits lim;
    CHECK_THROWS_AS(orbit_spheres(g, lim), std::invalid_argument);
  }
  SUBCASE("radius floor") {
    OrbitLimits lim = unbounded();
    lim.radius_floor = 0.5 * dumbbell_orbit().max_radius(1);
    const Orbit o = orbit_spheres(g, lim);
    for (std::size_t i = o.generation_start[1]; i < o.spheres.size(); ++i)
      CHECK(o.spheres[i].radius >= lim.radius_floor);
    CHECK(o.generation_size(1) < dumbbell_orbit().generation_size(1));
  }
  SUBCASE("branch cap keeps the largest children") {
    OrbitLimits lim;
    lim.max_generation = 2;
    lim.branch_cap = 2;
    lim.roots = {0, 300};
    const Orbit o = orbit_spheres(g, lim);
    CHECK(o.generation_size(0) == 2);
    CHECK(o.generation_size(1) == 4);
    CHECK(o.generation_size(2) == 8);
    const Orbit& full = dumbbell_orbit();
    double want = 0;
    for (std::size_t i = full.generation_start[1]; i < full.generation_start[2]; ++i) {
      const int base = full.spheres[full.spheres[i].parent].base;
      if (base == 0 || base == 300) want = std::max(want, full.spheres[i].radius);
    }
    CHECK(o.max_radius(1) == doctest::Approx(want));
  }
  SUBCASE("sphere cap truncates with a note") {
    OrbitLimits lim;
    lim.max_generation = 2;
    lim.radius_floor = 1e-12;
    lim.max_spheres = 5000;
    const Orbit o = orbit_spheres(g, lim);
    CHECK(o.truncated);
    CHECK_FALSE(o.note.empty());
    CHECK(o.generation_size(2) == 0);
  }
  SUBCASE("generation zero only") {
    OrbitLimits lim;
    lim.max_generation = 0;
    lim.radius_floor = 1e-12;
    const Orbit o = orbit_spheres(g, lim);
    CHECK(o.spheres.size() == g.size());
  }
}

TEST_CASE("orbit dump has one line per sphere") {
  OrbitLimits lim;
  lim.max_generation = 1;
  lim.radius_floor = 1e-12;
  lim.roots = {3};
  const Orbit o = orbit_spheres(testkit::dumbbell_group(), lim);
  std::ostringstream os;
  write_orbit(os, o);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# seq word", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> cols;
    for (std::string c; ls >> c;) cols.push_back(c);
    CHECK(cols.size() == 9);
    ++rows;
  }
  CHECK(rows == o.spheres.size());
}

TEST_CASE("polyhedron stages on the dumbbell") {
  const auto& g = testkit::dumbbell_group();
  OrbitLimits lim;
  lim.max_generation = 2;
  lim.radius_floor = 0.2;
  const auto stages = polyhedron_stages(g, orbit_spheres(g, lim), 3);
  REQUIRE(stages.size() == 4);
  for (std::size_t k = 0; k < stages.size(); ++k) {
    CHECK(stages[k].k == static_cast<int>(k));
    CHECK(stages[k].chambers == (std::size_t{1} << k));
    CHECK(stages[k].side_count == stages[k].recount);
  }
  CHECK(stages[0].side_count == g.size());
  for (std::size_t k = 1; k < stages.size(); ++k) {
    CHECK(stages[k].reflector_seq >= 0);
    CHECK(stages[k].side_count > stages[k - 1].side_count);
  }
  CHECK(stages.back().sides.size() == stages.back().side_count);
  std::ostringstream os;
  write_stages(os, stages);
  const std::string text = os.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
