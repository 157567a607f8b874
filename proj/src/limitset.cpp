#include "wildknot/limitset.hpp"
#include "wildknot/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wildknot {

const char* source_name(PointSource s) {
  return s == PointSource::SphereCenter ? "sphere_center" : "loxodromic_fixed";
}

PointCloud cloud_from_orbit(const Orbit& o, double eps) {
  PointCloud c;
  for (std::size_t i = 0; i < o.spheres.size(); ++i) {
    const OrbitSphere& s = o.spheres[i];
    if (!(s.radius < eps)) continue;
    if (!s.center.allFinite()) {
      ++c.infinite;
      continue;
    }
    c.points.push_back({s.center, PointSource::SphereCenter, static_cast<long>(i), {},
                        s.generation});
  }
  if (c.points.empty()) {
    std::ostringstream os;
    os << "no orbit sphere has radius below " << eps
       << "; the orbit is not deep enough for this resolution";
    c.notice = os.str();
  }
  return c;
}

namespace {

std::vector<char> has_children(const Orbit& o) {
  std::vector<char> kids(o.spheres.size(), 0);
  for (const auto& s : o.spheres)
    if (s.parent >= 0) kids[s.parent] = 1;
  return kids;
}

template <class F>
void for_cut(const Orbit& o, int L, F&& f) {
  if (L < 0 || L > o.limits.max_generation)
    throw std::out_of_range("cut depth outside the computed generations");
  if (o.truncated) throw std::runtime_error("cut of a truncated orbit: " + o.note);
  const auto kids = has_children(o);
  for (std::size_t i = 0; i < o.spheres.size(); ++i) {
    const OrbitSphere& s = o.spheres[i];
    if (s.generation == L || (s.generation < L && !kids[i])) f(i, s);
  }
}

}  // namespace

PointCloud cut_cloud(const Orbit& o, int L) {
  PointCloud c;
  for_cut(o, L, [&](std::size_t i, const OrbitSphere& s) {
    c.points.push_back({s.center, PointSource::SphereCenter, static_cast<long>(i), {},
                        s.generation});
  });
  return c;
}

double cut_radius(const Orbit& o, int L) {
  double r = 0;
  for_cut(o, L, [&](std::size_t, const OrbitSphere& s) { r = std::max(r, s.radius); });
  return r;
}

// ------------------------------------------------------ nearest neighbours

namespace {

class NearestIndex {
 public:
  explicit NearestIndex(const PointCloud& c) {
    for (const auto& p : c.points) soa_.push(p.p, 0.0);
    if (soa_.size() == 0) return;
    Vec4 lo = soa_.center(0), hi = lo;
    for (std::size_t i = 0; i < soa_.size(); ++i) {
      lo = lo.cwiseMin(soa_.center(i));
      hi = hi.cwiseMax(soa_.center(i));
    }
    diag_ = (hi - lo).norm();
    // Refine until occupied cells hold a few points each; clouds cluster
    // heavily, so a uniform estimate is far too coarse.
    double cell = std::max(diag_ / std::pow(static_cast<double>(soa_.size()), 0.25), 1e-300);
    for (int it = 0; it < 40; ++it) {
      std::vector<std::array<std::int64_t, 4>> keys(soa_.size());
      for (std::size_t i = 0; i < soa_.size(); ++i)
        for (int d = 0; d < 4; ++d)
          keys[i][d] = static_cast<std::int64_t>(std::floor((soa_.center(i)[d] - lo[d]) / cell));
      std::sort(keys.begin(), keys.end());
      const auto cells = static_cast<std::size_t>(
          std::unique(keys.begin(), keys.end()) - keys.begin());
      if (soa_.size() <= 4 * cells) break;
      cell /= 2;
    }
    grid_ = std::make_unique<kernels::BallGrid>(soa_, cell);
  }

  double distance(const Vec4& p) const {
    if (soa_.size() == 0) return std::numeric_limits<double>::infinity();
    for (double reach = grid_->cell();; reach *= 2) {
      double best = std::numeric_limits<double>::infinity();
      for (int j : grid_->near(p, reach)) best = std::min(best, (soa_.center(j) - p).norm());
      if (best <= reach) return best;
      if (reach > 4 * diag_ + (p - soa_.center(0)).norm()) {
        for (std::size_t j = 0; j < soa_.size(); ++j)
          best = std::min(best, (soa_.center(j) - p).norm());
        return best;
      }
    }
  }

 private:
  kernels::BallSoA soa_;
  std::unique_ptr<kernels::BallGrid> grid_;
  double diag_ = 0;
};

}  // namespace

std::vector<double> distances_to_cloud(const PointCloud& pts, const PointCloud& cloud) {
  const NearestIndex idx(cloud);
  std::vector<double> d(pts.points.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < static_cast<long>(d.size()); ++i) d[i] = idx.distance(pts.points[i].p);
  return d;
}

double hausdorff_one_sided(const PointCloud& a, const PointCloud& b) {
  const auto d = distances_to_cloud(a, b);
  double m = 0;
  for (double x : d) m = std::max(m, x);
  return m;
}

// -------------------------------------------------------------- loxodromics

namespace {

Vec4 reflect_point(const InversiveSphere& s, const Vec4& p) {
  const Vec4 d = p - s.center();
  return s.center() + (s.radius() * s.radius() / d.squaredNorm()) * d;
}

}  // namespace

LoxodromicReport loxodromic_points(const ReflectionGroup& g, const Orbit& o, int L,
                                   std::size_t n, std::uint64_t seed) {
  LoxodromicReport rep;
  rep.requested = n;
  if (n == 0) return rep;
  if (L < 1) throw std::invalid_argument("loxodromic_points: need generation >= 1");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < o.spheres.size(); ++i) {
    if (o.spheres[i].generation != L) continue;
    const Word w = o.word(i);
    if (g.order(w.front(), o.spheres[i].base) == 0) eligible.push_back(i);
  }
  rep.candidates = eligible.size();
  std::mt19937_64 rng(kernels::mix_seed(seed));
  // Partial Fisher-Yates with an explicit index draw, portable across
  // standard libraries.
  const std::size_t take = std::min(n, eligible.size());
  for (std::size_t k = 0; k < take; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng() % (eligible.size() - k));
    std::swap(eligible[k], eligible[j]);
  }
  eligible.resize(take);
  std::sort(eligible.begin(), eligible.end());

  for (std::size_t seq : eligible) {
    const OrbitSphere& node = o.spheres[seq];
    Word h = o.word(seq);
    h.push_back(node.base);

    const Frame f = fit_frame(g, h);
    const MobiusMap m = word_map(g, h, f);
    const MapClass cls = classify_map(m);
    const auto* lox = std::get_if<MapLoxodromic>(&cls);
    if (!lox || lox->attracting.is_infinity()) {
      ++rep.skipped;
      continue;
    }
    const Vec4 from_eigen = f.to_global(lox->attracting.euclidean());

    // Iterate the map itself; it contracts the node sphere into itself.
    Vec4 x = node.center;
    for (int it = 0; it < 500; ++it) {
      Vec4 y = x;
      for (auto l = h.rbegin(); l != h.rend(); ++l) y = reflect_point(g.spheres[*l], y);
      const double step = (y - x).norm();
      x = y;
      if (step <= 1e-15 * (1.0 + x.norm())) break;
    }
    rep.max_disagreement = std::max(rep.max_disagreement, (from_eigen - x).norm());
    rep.max_outside = std::max(rep.max_outside, (x - node.center).norm() - node.radius);
    rep.cloud.points.push_back({x, PointSource::LoxodromicFixed, static_cast<long>(seq), h,
                                node.generation});
  }
  if (rep.cloud.points.empty())
    rep.cloud.notice = "no loxodromic words available at this generation";
  return rep;
}

// ------------------------------------------------------------------ stages

std::vector<KnotStage> stage_report(const std::vector<PolyhedronStage>& stages,
                                    const LaurentPolynomial& base) {
  std::vector<KnotStage> out;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    KnotStage k;
    k.i = static_cast<int>(i);
    k.description = i == 0 ? "K_0 = K"
                           : "K_" + std::to_string(i) + " = K_" + std::to_string(i - 1) +
                                 " # K_" + std::to_string(i - 1);
    k.side_count = stages[i].side_count;
    k.chambers = stages[i].chambers;
    k.polynomial = stage_polynomial(base, static_cast<int>(i));
    out.push_back(std::move(k));
  }
  return out;
}

// ------------------------------------------------------------------ slices

SliceCloud slice_cloud(const PointCloud& c, int axis, double value, double thickness) {
  if (axis < 0 || axis > 3) throw std::invalid_argument("slice axis must be 0..3");
  if (!(thickness > 0)) throw std::invalid_argument("slice thickness must be positive");
  SliceCloud s;
  s.axis = axis;
  s.value = value;
  s.thickness = thickness;
  for (const auto& p : c.points) {
    if (std::abs(p.p[axis] - value) > thickness) continue;
    Eigen::Vector3d q;
    for (int i = 0, k = 0; i < 4; ++i)
      if (i != axis) q[k++] = p.p[i];
    s.points.push_back({q, p.source, p.seq, p.generation});
  }
  if (s.points.empty()) {
    std::ostringstream os;
    os << "no points within " << thickness << " of x" << axis + 1 << " = " << value;
    s.notice = os.str();
  }
  return s;
}

// ------------------------------------------------------------------ export

ExportFormat parse_format(const std::string& s) {
  if (s == "csv") return ExportFormat::Csv;
  if (s == "ply") return ExportFormat::Ply;
  if (s == "json") return ExportFormat::Json;
  throw std::invalid_argument("unknown export format '" + s + "' (csv, ply, json)");
}

namespace {

std::string word_field(const CloudPoint& p) {
  return p.source == PointSource::LoxodromicFixed ? format_word(p.word) : "";
}

void ply_header(std::ostream& out, std::size_t n, int dim, const std::string& notice) {
  out << "ply\nformat ascii 1.0\ncomment wildknot point cloud\n";
  if (!notice.empty()) out << "comment " << notice << "\n";
  out << "element vertex " << n << "\n";
  const char* names[] = {"x", "y", "z", "w"};
  for (int i = 0; i < dim; ++i) out << "property double " << names[i] << "\n";
  out << "property int generation\nproperty int source\nend_header\n";
}

}  // namespace

void write_cloud(std::ostream& out, const PointCloud& c, ExportFormat f) {
  out << std::setprecision(17);
  switch (f) {
    case ExportFormat::Csv:
      out << "x1,x2,x3,x4,source,seq,word,generation\n";
      for (const auto& p : c.points)
        out << p.p[0] << ',' << p.p[1] << ',' << p.p[2] << ',' << p.p[3] << ','
            << source_name(p.source) << ',' << p.seq << ',' << word_field(p) << ','
            << p.generation << '\n';
      break;
    case ExportFormat::Ply:
      ply_header(out, c.points.size(), 4, c.notice);
      for (const auto& p : c.points)
        out << p.p[0] << ' ' << p.p[1] << ' ' << p.p[2] << ' ' << p.p[3] << ' '
            << p.generation << ' ' << static_cast<int>(p.source) << '\n';
      break;
    case ExportFormat::Json: {
      nlohmann::json j;
      j["dimension"] = 4;
      j["infinite"] = c.infinite;
      j["notice"] = c.notice;
      j["points"] = nlohmann::json::array();
      for (const auto& p : c.points)
        j["points"].push_back({{"x", {p.p[0], p.p[1], p.p[2], p.p[3]}},
                               {"source", source_name(p.source)},
                               {"seq", p.seq},
                               {"word", word_field(p)},
                               {"generation", p.generation}});
      out << j.dump(1) << '\n';
      break;
    }
  }
}

void write_slice(std::ostream& out, const SliceCloud& c, ExportFormat f) {
  out << std::setprecision(17);
  switch (f) {
    case ExportFormat::Csv:
      out << "u1,u2,u3,source,seq,generation\n";
      for (const auto& p : c.points)
        out << p.p[0] << ',' << p.p[1] << ',' << p.p[2] << ',' << source_name(p.source) << ','
            << p.seq << ',' << p.generation << '\n';
      break;
    case ExportFormat::Ply:
      ply_header(out, c.points.size(), 3, c.notice);
      for (const auto& p : c.points)
        out << p.p[0] << ' ' << p.p[1] << ' ' << p.p[2] << ' ' << p.generation << ' '
            << static_cast<int>(p.source) << '\n';
      break;
    case ExportFormat::Json: {
      nlohmann::json j;
      j["dimension"] = 3;
      j["axis"] = c.axis + 1;
      j["value"] = c.value;
      j["thickness"] = c.thickness;
      j["notice"] = c.notice;
      j["points"] = nlohmann::json::array();
      for (const auto& p : c.points)
        j["points"].push_back({{"x", {p.p[0], p.p[1], p.p[2]}},
                               {"source", source_name(p.source)},
                               {"seq", p.seq},
                               {"generation", p.generation}});
      out << j.dump(1) << '\n';
      break;
    }
  }
}

PointCloud read_cloud_csv(std::istream& in) {
  PointCloud c;
  std::string line;
  if (!std::getline(in, line) || line.rfind("x1,x2,x3,x4", 0) != 0)
    throw std::runtime_error("cloud csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw std::runtime_error("cloud csv: expected 8 fields: " + line);
    CloudPoint p;
    for (int i = 0; i < 4; ++i) p.p[i] = std::stod(f[i]);
    p.source = f[4] == "loxodromic_fixed" ? PointSource::LoxodromicFixed
                                          : PointSource::SphereCenter;
    p.seq = std::stol(f[5]);
    if (!f[6].empty() && f[6] != "e") {
      std::stringstream ws(f[6]);
      std::string tok;
      while (std::getline(ws, tok, '.')) p.word.push_back(std::stoi(tok));
    }
    p.generation = std::stoi(f[7]);
    c.points.push_back(std::move(p));
  }
  return c;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void export_cloud(const PointCloud& c, ExportFormat f, const std::string& path) {
  auto out = open_out(path);
  write_cloud(out, c, f);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void export_slice(const SliceCloud& c, ExportFormat f, const std::string& path) {
  auto out = open_out(path);
  write_slice(out, c, f);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace wildknot
