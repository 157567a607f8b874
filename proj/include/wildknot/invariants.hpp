#pragma once

// Alexander invariants: Fox calculus on group presentations, Alexander
// polynomials over Z[t, 1/t], and their behavior under connected sum.

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildknot {

using BigInt = boost::multiprecision::cpp_int;

/// Finite Laurent polynomial with exact integer coefficients.
class LaurentPolynomial {
 public:
  LaurentPolynomial() = default;
  /// Coefficients of t^low, t^(low+1), ...
  LaurentPolynomial(std::vector<BigInt> coeffs, long low = 0);
  static LaurentPolynomial constant(BigInt c);
  static LaurentPolynomial monomial(BigInt c, long exponent);

  bool is_zero() const { return c_.empty(); }
  long low() const { return low_; }
  long high() const { return low_ + static_cast<long>(c_.size()) - 1; }
  /// high - low; 0 for constants, -1 for zero.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  BigInt coeff(long exponent) const;
  const std::vector<BigInt>& coeffs() const { return c_; }

  /// Unit multiple with lowest exponent 0 and positive leading coefficient.
  LaurentPolynomial normalized() const;
  /// +-t^k.
  bool is_unit() const;
  BigInt at_one() const;
  BigInt content() const;

  LaurentPolynomial operator+(const LaurentPolynomial& o) const;
  LaurentPolynomial operator-(const LaurentPolynomial& o) const;
  LaurentPolynomial operator-() const;
  LaurentPolynomial operator*(const LaurentPolynomial& o) const;
  LaurentPolynomial pow(unsigned long e) const;
  bool operator==(const LaurentPolynomial& o) const {
    return low_ == o.low_ && c_ == o.c_;
  }

  /// "t^2 - t + 1"; "0" for zero.
  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> c_;
  long low_ = 0;
};

/// Greatest common divisor up to units, normalized.
LaurentPolynomial gcd(const LaurentPolynomial& a, const LaurentPolynomial& b);
/// Exact quotient a / b; throws std::domain_error when b does not divide a.
LaurentPolynomial exact_divide(const LaurentPolynomial& a, const LaurentPolynomial& b);

/// Letters are generator indices + 1; negative letters are inverses.
using FreeWord = std::vector<int>;

FreeWord reduce_word(const FreeWord& w);
FreeWord invert_word(const FreeWord& w);

/// Element of the integral group ring of the free group.
using GroupRingElement = std::map<FreeWord, BigInt>;

class PresentationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroupPresentation {
  std::vector<std::string> generators;
  std::vector<FreeWord> relators;  // freely reduced

  long deficiency() const {
    return static_cast<long>(generators.size()) - static_cast<long>(relators.size());
  }
  /// Letters a-z name generators, capitals their inverses.
  FreeWord parse_word(const std::string& s) const;
  std::string format_word(const FreeWord& w) const;
};

/// Text format: first non-comment line lists the generators (single lower
/// case letters, separators optional); each further line is a relator word,
/// or "lhs = rhs" meaning lhs rhs^-1.  '#' starts a comment.
GroupPresentation parse_presentation(std::istream& in);
GroupPresentation load_presentation(const std::string& path);
void write_presentation(std::ostream& out, const GroupPresentation& p);

/// Named presets: unknot, trefoil, figure-eight, trefoil-sum (trefoil #
/// trefoil with merged meridians) and spun-trefoil (same group as trefoil).
GroupPresentation presentation_preset(const std::string& name);
std::vector<std::string> presentation_presets();

/// Fox derivative d w / d x_gen (gen is 0-based).
GroupRingElement fox_derivative(const FreeWord& w, int gen);
/// Image under the abelianization sending every generator to t.
LaurentPolynomial abelianize(const GroupRingElement& e);

/// Abelianized Fox matrix, relators x generators.
std::vector<std::vector<LaurentPolynomial>> alexander_matrix(const GroupPresentation& p);

/// Determinant by fraction-free elimination.
LaurentPolynomial determinant(std::vector<std::vector<LaurentPolynomial>> m);

/// gcd of the (n-1)-minors of the Alexander matrix, normalized.  Throws
/// PresentationError when the abelianization is not infinite cyclic
/// (some relator has nonzero exponent sum) or the minors all vanish.
LaurentPolynomial alexander_polynomial(const GroupPresentation& p);

/// Delta^(2^i): the polynomial of the i-fold iterated self connected sum.
LaurentPolynomial stage_polynomial(const LaurentPolynomial& delta, int i);

struct Verdict {
  bool nontrivial = false;
  std::string label;                 // NONTRIVIAL or TRIVIAL
  std::vector<long> stage_degrees;   // deg of stage polynomial 0..depth
  bool all_stages_nonunit = false;
  std::vector<std::string> cited;    // proof-level facts, not recomputed
};

Verdict nontriviality_verdict(const LaurentPolynomial& delta, int depth);

}  // namespace wildknot
