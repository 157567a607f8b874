#pragma once

// The reflection group generated by the cover balls: relations, word
// enumeration, the nested orbit of spheres and the polyhedron stages.

#include "wildknot/construction.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace wildknot {

/// Sequence of generator indices, applied left to right as matrices:
/// word (a, b, c) is the map R_a R_b R_c.
using Word = std::vector<int>;

bool is_reduced(const Word& w);
/// Canonical (length, lexicographic) order.
bool shortlex_less(const Word& a, const Word& b);
/// Dot-separated indices, "e" for the empty word.
std::string format_word(const Word& w);

struct ReflectionGroup {
  std::vector<InversiveSphere> spheres;
  std::vector<MobiusMap> reflections;  // global coordinates
  /// Finite Coxeter entries (j, m) per generator, sorted by j.
  std::vector<std::vector<std::pair<int, int>>> finite;
  std::vector<int> host;
  std::vector<std::vector<int>> blocks;    // generators by host cube
  std::vector<std::vector<int>> amalgams;  // Gamma_j, cyclic order

  std::size_t size() const { return spheres.size(); }
  /// m_ij: 1 on the diagonal, 2 or 3 for intersecting pairs, 0 for infinity.
  int order(int i, int j) const;
};

/// Throws std::runtime_error when an adjacency angle is not pi/2 or pi/3.
ReflectionGroup assemble_group(const BallCover& cov);

/// The nine generators of one surface face: four vertex balls, then the
/// five face balls.
std::vector<int> face_patch(const BallCover& cov, int face);

/// Frame centered on the generator spheres with scale equal to their
/// largest radius.
Frame fit_frame(const ReflectionGroup& g, const std::vector<int>& gens);
MobiusMap word_map(const ReflectionGroup& g, const Word& w, const Frame& f);

struct RelationReport {
  std::size_t pairs = 0;
  double max_residual = 0;        // max ||(R_i R_j)^m - I||
  double min_lower_power = 1e300;  // min ||(R_i R_j)^k - I||, 0 < k < m
  std::vector<std::string> failures;
  bool ok(double tol = 1e-8) const {
    return failures.empty() && max_residual <= tol && min_lower_power > 0.5;
  }
};

/// Coxeter relations for every finite pair, each evaluated in a frame fitted
/// to the two spheres.
RelationReport coxeter_suite(const ReflectionGroup& g);

struct Element {
  Word word;  // shortlex-least word reaching this matrix
  MobiusMap map;
};

struct Enumeration {
  std::vector<int> gens;
  Frame frame;
  std::vector<Element> elements;  // canonical order
  std::size_t words_generated = 0;
  std::size_t duplicates = 0;  // words merged into an earlier element
  bool truncated = false;
};

/// All reduced words of length <= L over `gens` (empty = every generator),
/// deduplicated by matrix identity in a fitted frame.
Enumeration enumerate_words(const ReflectionGroup& g, std::vector<int> gens,
                            int L, std::size_t max_elements = 2'000'000);

/// Geometric (Tits) representation of the Coxeter group on the given
/// generators.  With m in {2, 3, inf} every entry is an integer, so equality
/// of abstract group elements is exact; the representation is faithful.
class TitsRepresentation {
 public:
  using IMat = std::vector<std::int64_t>;  // row-major n x n

  TitsRepresentation(const ReflectionGroup& g, std::vector<int> gens);
  std::size_t rank() const { return gens_.size(); }
  IMat identity() const;
  /// M * sigma_k for local generator k; throws on overflow.
  IMat right_multiply(const IMat& m, int k) const;
  IMat evaluate(const Word& local_word) const;
  /// Index of a global generator among gens, or -1.
  int local(int global) const;

 private:
  std::vector<int> gens_;
  std::vector<std::int64_t> c_;  // c_ij = -2 B_ij
};

struct FaithfulnessReport {
  int max_length = 0;
  std::size_t abstract_elements = 0;
  std::size_t words = 0;
  double min_gap = 1e300;  // min ||M - I|| over non-identity elements
  Word closest;
  std::vector<std::string> violations;
  bool truncated = false;
  bool ok() const { return violations.empty() && min_gap > 0.1; }
};

/// Enumerates the abstract Coxeter group on `gens` exactly (Tits
/// representation) up to length L and checks that no non-identity element
/// maps within 0.1 of the identity and that distinct elements have distinct
/// Mobius matrices.
FaithfulnessReport faithfulness_scan(const ReflectionGroup& g,
                                     const std::vector<int>& gens, int L,
                                     std::size_t max_elements = 2'000'000);

struct DriftReport {
  std::size_t words = 0;
  double max_drift = 0;     // max ||M^T J M - J||
  double max_relative = 0;  // drift / max(1, ||M||^2)
  double max_norm = 0;      // largest matrix entry met
  Word worst;
};

/// Form drift over every reduced word of length <= L over gens, depth-first
/// with nothing stored.  Products are formed in extended precision and
/// re-projected onto O(5,1) after each letter: an exactly rounded double
/// matrix with entries near 1e5 already has drift above 1e-7.
DriftReport drift_scan(const ReflectionGroup& g, const std::vector<int>& gens,
                       int L);

// ------------------------------------------------------------------ orbit

/// A sphere g(s_base) with g = R_{w1} ... R_{wk}; its word is the parent's
/// word followed by the parent's base.
struct OrbitSphere {
  Vec4 center;
  double radius = 0;
  int parent = -1;
  int base = 0;
  int generation = 0;
};

struct OrbitLimits {
  int max_generation = 4;
  double radius_floor = 0;     // children below this are not materialized
  int branch_cap = 0;          // keep the largest B children (0 = all)
  std::vector<int> roots;      // empty = every generator
  std::size_t max_spheres = 20'000'000;
  bool parallel = true;  // expand parents with OpenMP (same output)
};

struct Orbit {
  std::vector<OrbitSphere> spheres;        // seq order: by generation
  std::vector<std::size_t> generation_start;  // size max_generation + 2
  OrbitLimits limits;
  bool truncated = false;  // a cap (not the floor) cut the enumeration
  std::string note;

  Word word(std::size_t seq) const;
  InversiveSphere sphere(std::size_t seq) const;
  std::size_t generation_size(int k) const;
  /// Largest radius in generation k (0 when empty).
  double max_radius(int k) const;
};

/// Nesting tree of the orbit: children of g(s_i) are g R_i (s_j) for every
/// generator j disjoint from i, each strictly inside its parent.
Orbit orbit_spheres(const ReflectionGroup& g, const OrbitLimits& lim);

struct NestingReport {
  std::size_t checked = 0;
  std::size_t violations = 0;  // parent not strictly containing child
  std::size_t order_violations = 0;
  std::size_t duplicates = 0;
  std::vector<double> max_radius;  // per generation
  bool ok() const {
    return violations == 0 && order_violations == 0 && duplicates == 0;
  }
};
NestingReport verify_nesting(const Orbit& o);

/// Columnar text, one sphere per line after a '#' header:
/// seq word x1 x2 x3 x4 radius parent generation.  The word column is the
/// group word followed by the base generator.
void write_orbit(std::ostream& out, const Orbit& o);

// -------------------------------------------------------------- polyhedra

struct SideSphere {
  Vec4 center;
  double radius = 0;
  Word word;  // side lies on word(s_gen), bounding the chamber word(P_0)
  int gen = 0;
};

struct PolyhedronStage {
  int k = 0;
  std::size_t chambers = 1;       // copies of P_0 making up P_k
  std::size_t side_count = 0;     // direct count of sides
  std::size_t recount = 0;        // formula 2(n-1) - orthogonal sides
  std::size_t orthogonal = 0;     // sides of P_{k-1} at right angles to the mirror
  long reflector_seq = -1;        // orbit index of the reflecting sphere
  std::vector<SideSphere> sides;  // filled for the last stage only
};

/// P_0 is the complement of the cover balls, a single chamber; P_k = P_{k-1}
/// u g_k(P_{k-1}) where g_k reflects in the lowest-seq orbit sphere that
/// carries a side and whose mirror image of P_{k-1} overlaps no chamber of
/// P_{k-1}.  A side is a maximal union of chamber faces on one sphere glued
/// along right-angled ridges.  Cost grows like 2^K times the generator count.
std::vector<PolyhedronStage> polyhedron_stages(const ReflectionGroup& g,
                                               const Orbit& orbit, int K);

/// Columnar text: k chambers sides recount orthogonal reflector_seq.
void write_stages(std::ostream& out, const std::vector<PolyhedronStage>& stages);
/// Columnar text for the stored sides of a stage: word gen x1..x4 radius.
void write_sides(std::ostream& out, const PolyhedronStage& stage);

struct DomainReport {
  std::size_t samples = 0;
  std::size_t generators = 0;
  std::size_t violations = 0;
  std::size_t rejected = 0;      // candidate points inside some ball
  bool infinity_checked = false;
  bool ok() const { return violations == 0 && samples > 0; }
};

/// Samples points outside every ball and checks that each generator maps
/// them strictly inside its own ball.
DomainReport fundamental_domain_check(const ReflectionGroup& g,
                                      std::size_t n_samples,
                                      std::uint64_t seed = 1);

}  // namespace wildknot
