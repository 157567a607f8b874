#include "support.hpp"
#include "wildknot/limitset.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <sstream>

using namespace wildknot;

namespace {

PointCloud random_cloud(testkit::Rng& rng, std::size_t n, double box) {
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    CloudPoint p;
    p.p = rng.point(box);
    p.seq = static_cast<long>(i);
    p.generation = static_cast<int>(i % 4);
    c.points.push_back(p);
  }
  return c;
}

double brute_nearest(const Vec4& p, const PointCloud& c) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : c.points) best = std::min(best, (p - q.p).norm());
  return best;
}

const Orbit& small_orbit() {
  static const Orbit o = [] {
    OrbitLimits lim;
    lim.max_generation = 3;
    lim.branch_cap = 4;
    lim.roots = {0, 1, 2, 300, 301};
    return orbit_spheres(testkit::dumbbell_group(), lim);
  }();
  return o;
}

}  // namespace

TEST_CASE("nearest distances and Hausdorff match brute force") {
  testkit::Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_cloud(rng, 300, 2.0);
    const auto b = random_cloud(rng, 500, 2.0 + trial);
    const auto d = distances_to_cloud(a, b);
    REQUIRE(d.size() == a.points.size());
    double h = 0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      const double want = brute_nearest(a.points[i].p, b);
      CHECK(d[i] == doctest::Approx(want).epsilon(1e-12));
      h = std::max(h, want);
    }
    CHECK(hausdorff_one_sided(a, b) == doctest::Approx(h).epsilon(1e-12));
  }
  const PointCloud empty;
  const auto a = random_cloud(rng, 3, 1.0);
  CHECK(std::isinf(hausdorff_one_sided(a, empty)));
  CHECK(hausdorff_one_sided(empty, a) == 0);
  CHECK(hausdorff_one_sided(a, a) == 0);
}

TEST_CASE("clouds from the orbit") {
  const Orbit& o = small_orbit();
  const double eps = o.max_radius(2) * 1.0001;
  const auto c = cloud_from_orbit(o, eps);
  std::size_t want = 0;
  for (const auto& s : o.spheres) want += s.radius < eps;
  CHECK(c.points.size() == want);
  for (const auto& p : c.points) {
    REQUIRE(p.seq >= 0);
    CHECK(o.spheres[p.seq].radius < eps);
    CHECK(p.p == o.spheres[p.seq].center);
  }

  const auto cut = cut_cloud(o, 3);
  CHECK(cut.points.size() == o.generation_size(3));  // the cap leaves no leaves
  double rmax = 0;
  for (const auto& p : cut.points) rmax = std::max(rmax, o.spheres[p.seq].radius);
  CHECK(cut_radius(o, 3) == doctest::Approx(rmax));
  CHECK(cut_radius(o, 3) == doctest::Approx(o.max_radius(3)));
}

TEST_CASE("cut clouds keep childless shallow spheres") {
  OrbitLimits lim;
  lim.max_generation = 2;
  lim.radius_floor = 0.3 * small_orbit().max_radius(2);
  lim.roots = {0, 300};
  const Orbit o = orbit_spheres(testkit::dumbbell_group(), lim);
  std::vector<int> kids(o.spheres.size(), 0);
  for (const auto& s : o.spheres)
    if (s.parent >= 0) ++kids[s.parent];
  std::size_t want = o.generation_size(2);
  for (std::size_t i = 0; i < o.generation_start[2]; ++i) want += kids[i] == 0;
  CHECK(want > o.generation_size(2));
  CHECK(cut_cloud(o, 2).points.size() == want);
}

TEST_CASE("loxodromic fixed points are fixed and lie in their spheres") {
  const auto& g = testkit::dumbbell_group();
  const Orbit& o = small_orbit();
  const auto rep = loxodromic_points(g, o, 3, 40, 7);
  CHECK(rep.requested == 40);
  REQUIRE(rep.cloud.points.size() == 40);
  CHECK(rep.skipped == 0);
  CHECK(rep.max_outside < 0);
  CHECK(rep.max_disagreement < 1e-8);
  for (const auto& p : rep.cloud.points) {
    CHECK(p.source == PointSource::LoxodromicFixed);
    REQUIRE(p.seq >= 0);
    const Word w = o.word(p.seq);
    Word h = w;
    h.push_back(o.spheres[p.seq].base);
    CHECK(p.word == h);
    // Apply h by successive Euclidean inversions, last letter first.
    Vec4 q = p.p;
    for (auto it = h.rbegin(); it != h.rend(); ++it)
      q = testkit::invert_point(g.spheres[*it].center(), g.spheres[*it].radius(), q);
    CHECK((q - p.p).norm() < 1e-8);
    const auto& s = o.spheres[p.seq];
    CHECK((p.p - s.center).norm() < s.radius);
  }
  const auto again = loxodromic_points(g, o, 3, 40, 7);
  for (std::size_t i = 0; i < again.cloud.points.size(); ++i)
    CHECK(again.cloud.points[i].p == rep.cloud.points[i].p);
}

TEST_CASE("slices project onto the other coordinates") {
  testkit::Rng rng(42);
  const auto c = random_cloud(rng, 2000, 1.0);
  const auto s = slice_cloud(c, 1, 0.25, 0.1);
  std::size_t want = 0;
  for (const auto& p : c.points) want += std::abs(p.p[1] - 0.25) <= 0.1;
  REQUIRE(s.points.size() == want);
  CHECK(s.axis == 1);
  std::size_t k = 0;
  for (const auto& p : c.points) {
    if (std::abs(p.p[1] - 0.25) > 0.1) continue;
    CHECK(s.points[k].p == Eigen::Vector3d(p.p[0], p.p[2], p.p[3]));
    ++k;
  }
  CHECK_THROWS(slice_cloud(c, 4, 0, 1));
  CHECK_THROWS(slice_cloud(c, 0, 0, -1));
  CHECK_FALSE(slice_cloud(c, 0, 50, 0.1).notice.empty());
}

TEST_CASE("cloud export formats") {
  testkit::Rng rng(43);
  auto c = random_cloud(rng, 25, 3.0);
  c.points[3].source = PointSource::LoxodromicFixed;
  c.points[3].word = {4, 0, 17};
  c.infinite = 2;

  SUBCASE("csv round trip is exact") {
    std::stringstream ss;
    write_cloud(ss, c, ExportFormat::Csv);
    const auto back = read_cloud_csv(ss);
    REQUIRE(back.points.size() == c.points.size());
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      CHECK(back.points[i].p == c.points[i].p);
      CHECK(back.points[i].source == c.points[i].source);
      CHECK(back.points[i].seq == c.points[i].seq);
      CHECK(back.points[i].generation == c.points[i].generation);
    }
    CHECK(back.points[3].word == c.points[3].word);
  }
  SUBCASE("ply header") {
    std::ostringstream os;
    write_cloud(os, c, ExportFormat::Ply);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "ply");
    std::getline(in, line);
    CHECK(line == "format ascii 1.0");
    bool vertex = false, end = false;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line == "element vertex 25") vertex = true;
      if (end) ++rows;
      if (line == "end_header") end = true;
    }
    CHECK(vertex);
    CHECK(rows == 25);
  }
  SUBCASE("json") {
    std::ostringstream os;
    write_cloud(os, c, ExportFormat::Json);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["points"].size() == 25);
    CHECK(j["infinite"] == 2);
    CHECK(j["points"][3]["word"] == "4.0.17");
    CHECK(j["points"][5]["x"][2].get<double>() == c.points[5].p[2]);
  }
  SUBCASE("format names") {
    CHECK(parse_format("csv") == ExportFormat::Csv);
    CHECK(parse_format("ply") == ExportFormat::Ply);
    CHECK(parse_format("json") == ExportFormat::Json);
    CHECK_THROWS_AS(parse_format("xyz"), std::invalid_argument);
  }
  SUBCASE("bad csv") {
    std::istringstream no_header("1,2,3\n");
    CHECK_THROWS(read_cloud_csv(no_header));
    std::istringstream short_row("x1,x2,x3,x4,source,seq,word,generation\n1,2,3\n");
    CHECK_THROWS(read_cloud_csv(short_row));
  }
}

TEST_CASE("stage report squares the polynomial at each stage") {
  std::vector<PolyhedronStage> stages(3);
  for (int k = 0; k < 3; ++k) {
    stages[k].k = k;
    stages[k].chambers = std::size_t{1} << k;
    stages[k].side_count = 10 + k;
  }
  const LaurentPolynomial tre({1, -1, 1});
  const auto rep = stage_report(stages, tre);
  REQUIRE(rep.size() == 3);
  CHECK(rep[0].polynomial == tre);
  CHECK(rep[1].polynomial == tre * tre);
  CHECK(rep[2].polynomial == tre * tre * tre * tre);
  CHECK(rep[2].side_count == 12);
  CHECK(rep[2].chambers == 4);
}
