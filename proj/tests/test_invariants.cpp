#include "support.hpp"
#include "wildknot/invariants.hpp"

#include <doctest.h>

#include <numeric>
#include <sstream>

using namespace wildknot;
using LP = LaurentPolynomial;

namespace doctest {
template <>
struct StringMaker<LP> {
  static String convert(const LP& p) { return p.to_string().c_str(); }
};
}  // namespace doctest

namespace {

LP random_poly(testkit::Rng& rng, int max_terms = 5) {
  const int n = rng.integer(1, max_terms);
  std::vector<BigInt> c;
  for (int i = 0; i < n; ++i) c.emplace_back(rng.integer(-4, 4));
  return LP(c, rng.integer(-3, 3));
}

FreeWord random_word(testkit::Rng& rng, int gens, int len) {
  FreeWord w;
  for (int i = 0; i < len; ++i) {
    const int g = rng.integer(1, gens);
    w.push_back(rng.integer(0, 1) ? g : -g);
  }
  return w;
}

long exponent_sum(const FreeWord& w) {
  long e = 0;
  for (int x : w) e += x > 0 ? 1 : -1;
  return e;
}

/// Laplace expansion along the first row.
LP laplace(const std::vector<std::vector<LP>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  LP sum;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<LP>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<LP> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(row);
    }
    const LP term = m[0][j] * laplace(minor);
    sum = (j % 2 == 0) ? sum + term : sum - term;
  }
  return sum;
}

GroupPresentation parse(const std::string& text) {
  std::istringstream in(text);
  return parse_presentation(in);
}

}  // namespace

TEST_CASE("Laurent polynomial arithmetic") {
  const LP t = LP::monomial(1, 1);
  const LP one = LP::constant(1);
  CHECK((t - one) * (t + one) == t * t - one);
  CHECK(LP({1, -1, 1}).to_string() == "t^2 - t + 1");
  CHECK(LP().to_string() == "0");
  CHECK(LP({0, 0, 3, 0}, -2).low() == 0);
  CHECK(LP({0, 0, 3, 0}, -2).degree() == 0);
  CHECK(LP({2, 0, -2}, -5).normalized() == LP({2, 0, -2}).normalized());
  CHECK(LP::monomial(-1, 7).is_unit());
  CHECK_FALSE(LP::constant(2).is_unit());
  CHECK(LP({1, -3, 1}).at_one() == -1);
  CHECK(LP({6, 0, -4}).content() == 2);
  CHECK(t.pow(10) == LP::monomial(1, 10));
  CHECK(LP::monomial(1, -2).coeff(-2) == 1);
}

TEST_CASE("ring laws on random polynomials") {
  testkit::Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    const LP a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * b == b * a);
    CHECK(a - a == LP());
    if (!b.is_zero()) CHECK(exact_divide(a * b, b) == a);
  }
}

TEST_CASE("gcd properties") {
  testkit::Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    const LP a = random_poly(rng, 4), b = random_poly(rng, 4), c = random_poly(rng, 3);
    if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
    const LP g = gcd(a * c, b * c);
    CHECK_NOTHROW(exact_divide(g, c));
    CHECK_NOTHROW(exact_divide(a * c, g));
    CHECK_NOTHROW(exact_divide(b * c, g));
    CHECK(g == gcd(b * c, a * c));
    CHECK(g == g.normalized());
  }
  CHECK_THROWS_AS(exact_divide(LP({1, 0, 1}), LP({1, 1})), std::domain_error);
}

TEST_CASE("free words") {
  CHECK(reduce_word({1, 2, -2, -1, 3}) == FreeWord{3});
  CHECK(invert_word({1, -2, 3}) == FreeWord{-3, 2, -1});
  testkit::Rng rng(53);
  for (int i = 0; i < 100; ++i) {
    const FreeWord w = random_word(rng, 3, 8);
    FreeWord ww = w;
    const FreeWord inv = invert_word(w);
    ww.insert(ww.end(), inv.begin(), inv.end());
    CHECK(reduce_word(ww).empty());
  }
}

TEST_CASE("Fox calculus satisfies the fundamental formula") {
  // sum_j abel(dw/dx_j) (t - 1) = t^e(w) - 1 when every generator maps to t.
  testkit::Rng rng(54);
  const LP t = LP::monomial(1, 1);
  for (int i = 0; i < 300; ++i) {
    const int gens = rng.integer(1, 4);
    const FreeWord w = random_word(rng, gens, rng.integer(0, 12));
    LP sum;
    for (int j = 0; j < gens; ++j) sum = sum + abelianize(fox_derivative(w, j));
    const long e = exponent_sum(w);
    CHECK(sum * (t - LP::constant(1)) == LP::monomial(1, e) - LP::constant(1));
  }
  // d(x y x^-1)/dx = 1 - x y x^-1.
  const auto d = fox_derivative({1, 2, -1}, 0);
  CHECK(d.size() == 2);
  CHECK(d.at(FreeWord{}) == 1);
  CHECK(d.at(FreeWord{1, 2, -1}) == -1);
}

TEST_CASE("fraction-free determinant matches Laplace expansion") {
  testkit::Rng rng(55);
  for (int n = 1; n <= 5; ++n)
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::vector<LP>> m(n, std::vector<LP>(n));
      for (auto& row : m)
        for (auto& x : row) x = rng.integer(0, 3) == 0 ? LP() : random_poly(rng, 3);
      CHECK(determinant(m) == laplace(m));
    }
  std::vector<std::vector<LP>> singular(2, std::vector<LP>(2, LP({1, 1})));
  CHECK(determinant(singular).is_zero());
}

TEST_CASE("preset knot polynomials") {
  CHECK(alexander_polynomial(presentation_preset("unknot")) == LP::constant(1));
  CHECK(alexander_polynomial(presentation_preset("trefoil")) == LP({1, -1, 1}));
  CHECK(alexander_polynomial(presentation_preset("figure-eight")) == LP({1, -3, 1}));
  CHECK(alexander_polynomial(presentation_preset("spun-trefoil")) == LP({1, -1, 1}));
  CHECK(alexander_polynomial(presentation_preset("trefoil-sum")) == LP({1, -1, 1}).pow(2));
  for (const auto& name : presentation_presets())
    CHECK(abs(alexander_polynomial(presentation_preset(name)).at_one()) == 1);
  CHECK_THROWS(presentation_preset("no-such-knot"));
}

TEST_CASE("torus knot T(2,5)") {
  const auto p = parse("a b\nababa = babab\n");
  CHECK(p.deficiency() == 1);
  CHECK(alexander_polynomial(p) == LP({1, -1, 1, -1, 1}));
}

TEST_CASE("Tietze moves leave the polynomial unchanged") {
  const LP tre({1, -1, 1});
  // Extra meridian generator c = a b a^-1.
  CHECK(alexander_polynomial(parse("abc\naba = bab\nc = abA\n")) == tre);
  // Conjugated relator, inverted relator.
  CHECK(alexander_polynomial(parse("ab\naabaBABA\n")) == tre);
  CHECK(alexander_polynomial(parse("ab\nbabABA\n")) == tre);
  // Wirtinger presentation with a redundant relator.
  CHECK(alexander_polynomial(parse("abc\nac = ba\nba = cb\ncb = ac\n")) == tre);
}

TEST_CASE("presentation errors") {
  CHECK_THROWS_AS(parse(""), PresentationError);
  CHECK_THROWS_AS(parse("ab\nabx\n"), PresentationError);
  CHECK_THROWS_AS(parse("aa\nab\n"), PresentationError);
  // Abelianization Z/2 x Z: not a knot group.
  CHECK_THROWS_AS(alexander_polynomial(parse("ab\naa\n")), PresentationError);
  CHECK_THROWS_AS(load_presentation("/nonexistent.pres"), PresentationError);
  const auto p = presentation_preset("figure-eight");
  std::stringstream ss;
  write_presentation(ss, p);
  const auto back = parse_presentation(ss);
  CHECK(back.generators == p.generators);
  CHECK(back.relators == p.relators);
  CHECK(p.format_word(p.parse_word("aBc")) == "aBc");
}

TEST_CASE("stage polynomials and verdicts") {
  const LP tre({1, -1, 1});
  for (int i = 0; i <= 4; ++i) {
    const LP s = stage_polynomial(tre, i);
    CHECK(s == tre.pow(1UL << i));
    CHECK(s.degree() == 2L << i);
  }
  const auto v = nontriviality_verdict(tre, 6);
  CHECK(v.nontrivial);
  CHECK(v.label == "NONTRIVIAL");
  CHECK(v.all_stages_nonunit);
  REQUIRE(v.stage_degrees.size() == 7);
  for (int i = 0; i <= 6; ++i) CHECK(v.stage_degrees[i] == 2L << i);
  CHECK_FALSE(v.cited.empty());
  const auto u = nontriviality_verdict(LP::constant(1), 3);
  CHECK_FALSE(u.nontrivial);
  CHECK(u.label == "TRIVIAL");
}
