#include "wildknot/construction.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wildknot {

std::array<int, 3> Cube3::span() const {
  std::array<int, 3> s{};
  int k = 0;
  for (int d = 0; d < 4; ++d)
    if (d != omitted) s[k++] = d;
  return s;
}

std::vector<Cube3> CubeComplex::chain() const {
  std::vector<Cube3> out;
  out.reserve(tube.size() + 2);
  out.push_back(q0);
  out.insert(out.end(), tube.begin(), tube.end());
  if (has_q1) out.push_back(q1);
  return out;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += "\n  " + x;
  return s;
}

}  // namespace

ComplexError::ComplexError(std::vector<std::string> problems)
    : std::runtime_error("invalid cube complex:" + join(problems)),
      problems_(std::move(problems)) {}

// ----------------------------------------------------------------- checks

namespace {

struct Box {
  IVec4 lo, hi;
};

Box box_of(const Cube3& c) {
  Box b{c.corner, c.corner};
  for (int d = 0; d < 4; ++d)
    if (d != c.omitted) b.hi[d] += c.edge;
  return b;
}

// Intersection of closed boxes; nullopt when empty.
std::optional<Box> meet(const Box& a, const Box& b) {
  Box m{};
  for (int d = 0; d < 4; ++d) {
    m.lo[d] = std::max(a.lo[d], b.lo[d]);
    m.hi[d] = std::min(a.hi[d], b.hi[d]);
    if (m.lo[d] > m.hi[d]) return std::nullopt;
  }
  return m;
}

bool is_unit_square(const Box& b) {
  int flat = 0, unit = 0;
  for (int d = 0; d < 4; ++d) {
    const auto w = b.hi[d] - b.lo[d];
    if (w == 0) ++flat;
    if (w == 1) ++unit;
  }
  return flat == 2 && unit == 2;
}

// True when the square is centered on a 2-face of the big cube.
bool centered_on_face(const Cube3& big, const Box& sq) {
  const Box cb = box_of(big);
  for (int f : big.span()) {
    for (std::int64_t side : {cb.lo[f], cb.hi[f]}) {
      if (sq.lo[f] != side || sq.hi[f] != side) continue;
      bool centered = true;
      for (int d = 0; d < 4; ++d) {
        if (d == f) continue;
        // Compare doubled coordinates so odd edges stay integral.
        if (sq.lo[d] + sq.hi[d] != cb.lo[d] + cb.hi[d]) centered = false;
      }
      if (centered) return true;
    }
  }
  return false;
}

std::string label(const CubeComplex& c, std::size_t chain_index) {
  if (chain_index == 0) return "Q0";
  if (c.has_q1 && chain_index == c.tube.size() + 1) return "Q1";
  return "T" + std::to_string(chain_index - 1);
}

}  // namespace

std::vector<std::string> validate_complex(const CubeComplex& c) {
  std::vector<std::string> bad;
  if (!(c.unit > 0)) bad.push_back("unit length must be positive");
  if (c.big_edge < 1) bad.push_back("big edge must be positive");
  if (c.tube.empty()) bad.push_back("empty tube list (no fusion)");
  if (!c.has_q1) bad.push_back("missing Q1");
  if (c.levels.empty()) bad.push_back("no level hyperplanes declared");
  if (!bad.empty()) return bad;

  const auto chain = c.chain();
  const auto [lmin, lmax] = std::minmax_element(c.levels.begin(), c.levels.end());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Cube3& q = chain[i];
    const bool big = i == 0 || i + 1 == chain.size();
    const std::string name = label(c, i);
    if (q.omitted < 0 || q.omitted > 3) {
      bad.push_back(name + ": omitted axis out of range");
      continue;
    }
    if (q.edge != (big ? c.big_edge : 1))
      bad.push_back(name + ": edge " + std::to_string(q.edge) + " expected " +
                    std::to_string(big ? c.big_edge : 1));
    if (big && q.omitted != 3)
      bad.push_back(name + ": big cubes must lie in a level hyperplane");
    if (q.omitted == 3 &&
        std::find(c.levels.begin(), c.levels.end(), q.corner[3]) == c.levels.end())
      bad.push_back(name + ": x4 = " + std::to_string(q.corner[3]) +
                    " is not a declared level");
    const Box b = box_of(q);
    if (b.lo[3] < *lmin || b.hi[3] > *lmax)
      bad.push_back(name + ": leaves the slab between the outer levels");
  }
  if (!bad.empty()) return bad;

  std::vector<Box> boxes;
  for (const auto& q : chain) boxes.push_back(box_of(q));
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      const auto m = meet(boxes[i], boxes[j]);
      const std::string pair = label(c, i) + "/" + label(c, j);
      if (j == i + 1) {
        if (!m || !is_unit_square(*m)) {
          bad.push_back(pair + ": consecutive cubes must share exactly a unit square");
          continue;
        }
        if (i == 0 && !centered_on_face(chain[0], *m))
          bad.push_back(pair + ": attaching square not centered on a face of Q0");
        if (j + 1 == chain.size() && !centered_on_face(chain[j], *m))
          bad.push_back(pair + ": attaching square not centered on a face of Q1");
      } else if (m) {
        bad.push_back(pair + ": non-consecutive cubes intersect");
      }
    }
  }
  return bad;
}

// --------------------------------------------------------------------- I/O

CubeComplex parse_complex(std::istream& in) {
  CubeComplex c;
  c.levels.clear();
  c.has_q1 = false;
  bool have_q0 = false, have_header = false;
  std::vector<std::string> bad;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (!have_header) {
      int version = 0;
      if (tag != "wildknot-cubes" || !(ls >> version) || version != 1)
        throw ComplexError({where + "expected header 'wildknot-cubes 1'"});
      have_header = true;
      continue;
    }
    if (tag == "unit") {
      if (!(ls >> c.unit)) bad.push_back(where + "bad unit");
    } else if (tag == "big") {
      if (!(ls >> c.big_edge)) bad.push_back(where + "bad big edge");
    } else if (tag == "levels") {
      std::int64_t v;
      while (ls >> v) c.levels.push_back(v);
      if (!ls.eof()) bad.push_back(where + "bad level list");
    } else if (tag == "Q0" || tag == "Q1" || tag == "T") {
      Cube3 q;
      int axis = 0;
      if (!(ls >> q.corner[0] >> q.corner[1] >> q.corner[2] >> q.corner[3] >>
            q.edge >> axis)) {
        bad.push_back(where + "cube record needs 4 corner ints, edge, axis");
        continue;
      }
      q.omitted = axis - 1;
      if (tag == "Q0") {
        if (have_q0) bad.push_back(where + "duplicate Q0");
        c.q0 = q;
        have_q0 = true;
      } else if (tag == "Q1") {
        if (c.has_q1) bad.push_back(where + "duplicate Q1");
        c.q1 = q;
        c.has_q1 = true;
      } else {
        c.tube.push_back(q);
      }
    } else {
      bad.push_back(where + "unknown record '" + tag + "'");
    }
    std::string rest;
    if (ls.clear(), ls >> rest) bad.push_back(where + "trailing tokens");
  }
  if (!have_header) bad.push_back("empty file");
  if (!have_q0) bad.push_back("missing Q0");
  if (!bad.empty()) throw ComplexError(bad);
  return c;
}

CubeComplex load_complex(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ComplexError({"cannot open " + path});
  CubeComplex c = parse_complex(f);
  auto bad = validate_complex(c);
  if (!bad.empty()) throw ComplexError(bad);
  return c;
}

namespace {

void write_cube(std::ostream& out, const char* tag, const Cube3& q) {
  out << tag << ' ' << q.corner[0] << ' ' << q.corner[1] << ' ' << q.corner[2]
      << ' ' << q.corner[3] << ' ' << q.edge << ' ' << q.omitted + 1 << '\n';
}

}  // namespace

void write_complex(std::ostream& out, const CubeComplex& c) {
  out << "wildknot-cubes 1\n";
  out << "# records: tag x1 x2 x3 x4 edge omitted-axis(1..4)\n";
  std::ostringstream u;
  u.precision(17);
  u << c.unit;
  out << "unit " << u.str() << '\n';
  out << "big " << c.big_edge << '\n';
  out << "levels";
  for (auto v : c.levels) out << ' ' << v;
  out << '\n';
  write_cube(out, "Q0", c.q0);
  for (const auto& q : c.tube) write_cube(out, "T", q);
  if (c.has_q1) write_cube(out, "Q1", c.q1);
}

// ----------------------------------------------------------------- presets

namespace {

// Unit tube cubes with cross-section [s, s+1]^2 in (x2, x3), marching along
// x1 (at fixed x4) or x4 (at fixed x1) from `from` to `to`.
void march(std::vector<Cube3>& tube, int axis, std::int64_t fixed,
           std::int64_t from, std::int64_t to, std::int64_t s) {
  const std::int64_t step = to > from ? 1 : -1;
  for (std::int64_t x = from; x != to; x += step) {
    const std::int64_t lo = step > 0 ? x : x - 1;
    Cube3 q;
    q.edge = 1;
    if (axis == 0) {
      q.corner = {lo, s, s, fixed};
      q.omitted = 3;
    } else {
      q.corner = {fixed, s, s, lo};
      q.omitted = 0;
    }
    tube.push_back(q);
  }
}

}  // namespace

CubeComplex spun_trefoil_preset() {
  CubeComplex c;
  c.unit = 1.0;
  c.big_edge = 27;
  c.levels = {-27, 0, 54, 81};
  c.q0 = Cube3{{0, 0, 0, 0}, 27, 3};
  c.q1 = Cube3{{40, 0, 0, 54}, 27, 3};
  c.has_q1 = true;
  const std::int64_t s = 13;  // central unit square of a 27 x 27 face
  march(c.tube, 0, 0, 27, 33, s);
  march(c.tube, 3, 33, 0, -27, s);
  march(c.tube, 0, -27, 33, -6, s);
  march(c.tube, 3, -6, -27, 81, s);
  march(c.tube, 0, 81, -6, 73, s);
  march(c.tube, 3, 73, 81, 54, s);
  march(c.tube, 0, 54, 73, 67, s);
  return c;
}

CubeComplex dumbbell_fixture() {
  CubeComplex c;
  c.big_edge = 3;
  c.levels = {0};
  c.q0 = Cube3{{0, 0, 0, 0}, 3, 3};
  c.q1 = Cube3{{6, 0, 0, 0}, 3, 3};
  march(c.tube, 0, 0, 3, 6, 1);
  return c;
}

CubeComplex single_cube(std::int64_t edge) {
  CubeComplex c;
  c.big_edge = edge;
  c.levels = {0};
  c.q0 = Cube3{{0, 0, 0, 0}, edge, 3};
  c.has_q1 = false;
  return c;
}

}  // namespace wildknot
