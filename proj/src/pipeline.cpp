#include "wildknot/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wildknot {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void validate_config(const RunConfig& c) {
  auto bad = [](const std::string& f, const std::string& why) {
    throw std::invalid_argument("config: " + f + " " + why);
  };
  if (c.input.empty()) bad("input", "is empty");
  if (c.refinement < 0 || c.refinement > 4) bad("refinement", "must be in [0, 4]");
  if (c.max_length < 0 || c.max_length > 12) bad("max_length", "must be in [0, 12]");
  if (!(c.epsilon >= 0) || !std::isfinite(c.epsilon)) bad("epsilon", "must be finite and >= 0");
  if (c.stages < 0 || c.stages > 12) bad("stages", "must be in [0, 12]");
  if (c.bend_amalgam < 0) bad("bend_amalgam", "must be >= 0");
  if (c.bend_angles.empty()) bad("bend_angles", "is empty");
  for (double t : c.bend_angles)
    if (!std::isfinite(t) || std::abs(t) > 3.2) bad("bend_angles", "entries must lie in [-3.2, 3.2]");
  if (!std::isfinite(c.bend_probe)) bad("bend_probe", "must be finite");
  if (c.out_dir.empty()) bad("out_dir", "is empty");
  if (c.coverage_samples == 0) bad("coverage_samples", "must be positive");
  if (c.domain_samples == 0) bad("domain_samples", "must be positive");
  if (c.loxodromics == 0) bad("loxodromics", "must be positive");
  if (c.faithfulness_length < 1 || c.faithfulness_length > 8)
    bad("faithfulness_length", "must be in [1, 8]");
  if (c.beam < 1 || c.beam > 8) bad("beam", "must be in [1, 8]");
  const Tolerances& t = c.tol;
  auto range = [&](const char* f, double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) bad(std::string("tol.") + f, "outside its safe range");
  };
  range("angle", t.angle, 1e-14, 1e-6);
  range("relation", t.relation, 1e-14, 1e-4);
  range("drift", t.drift, 1e-14, 1e-4);
  range("identity_gap", t.identity_gap, 1e-6, 1.0);
  range("lower_power", t.lower_power, 1e-3, 1.0);
  range("decay", t.decay, 1e-6, 1.0);
  range("commutation", t.commutation, 1e-14, 1e-4);
  range("lambda_change", t.lambda_change, 0.0, 1.0);
}

namespace {

json config_object(const RunConfig& c) {
  json j;
  j["input"] = c.input;
  j["refinement"] = c.refinement;
  j["max_length"] = c.max_length;
  j["epsilon"] = c.epsilon;
  j["stages"] = c.stages;
  j["bend_amalgam"] = c.bend_amalgam;
  j["bend_angles"] = c.bend_angles;
  j["bend_probe"] = c.bend_probe;
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["coverage_samples"] = c.coverage_samples;
  j["domain_samples"] = c.domain_samples;
  j["loxodromics"] = c.loxodromics;
  j["faithfulness_length"] = c.faithfulness_length;
  j["patch_face"] = c.patch_face;
  j["beam"] = c.beam;
  j["presentation"] = c.presentation;
  j["tol"] = {{"angle", c.tol.angle},
              {"relation", c.tol.relation},
              {"drift", c.tol.drift},
              {"identity_gap", c.tol.identity_gap},
              {"lower_power", c.tol.lower_power},
              {"decay", c.tol.decay},
              {"commutation", c.tol.commutation},
              {"lambda_change", c.tol.lambda_change}};
  return j;
}

Metric metric(std::string name, double value, std::string rel, double bound) {
  return Metric{std::move(name), value, std::move(rel), bound};
}

CheckResult finish(CheckResult c) {
  c.pass = std::all_of(c.metrics.begin(), c.metrics.end(),
                       [](const Metric& m) { return m.holds(); });
  return c;
}

json check_object(const CheckResult& c) {
  json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["metrics"] = json::array();
  for (const auto& m : c.metrics)
    j["metrics"].push_back({{"name", m.name},
                            {"value", m.value},
                            {"relation", m.relation},
                            {"bound", m.bound},
                            {"holds", m.holds()}});
  j["notes"] = c.notes;
  return j;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class F>
  void file(const std::string& name, F&& body) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    body(out);
    if (!out) throw std::runtime_error("write failed: " + (dir_ / name).string());
    names_.push_back(name);
  }
  void json_file(const std::string& name, const json& j) {
    file(name, [&](std::ostream& o) { o << j.dump(1) << '\n'; });
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

const char* const kCheckNames[10] = {
    "cover geometry", "coverage",         "coxeter relations and drift",
    "faithfulness",   "nesting and decay", "fundamental domain",
    "loxodromic containment", "bending",  "invariants",
    "reproducibility"};

// Every stage of the run; filled in order, later stages read earlier ones.
struct State {
  State(const RunConfig& c, std::ostream* l) : cfg(c), log(l) {}
  const RunConfig& cfg;
  std::ostream* log;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  std::optional<BallCover> cover;
  std::optional<ReflectionGroup> group;
  std::vector<int> patch;
  Orbit floor_orbit, beam_orbit;
  std::vector<PolyhedronStage> stages;
  PointCloud cut, lox_cloud;
  std::vector<BentRepresentation> bent;
  std::vector<int> bent_gens;
  json alexander;

  void note(const std::string& s) {
    if (!log) return;
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    *log << "[" << std::fixed << std::setprecision(1) << t << "s] " << s << std::endl;
    log->unsetf(std::ios::floatfield);
  }
};

std::vector<CheckResult> cover_checks(State& s) {
  const RunConfig& c = s.cfg;
  s.cover = build_cover(load_input(c.input), c.refinement);
  const BallCover& cov = *s.cover;
  s.note("cover: " + std::to_string(cov.balls.size()) + " balls");
  const CoverReport r = validate_cover(cov, c.coverage_samples, c.seed);
  s.note("cover validated");

  CheckResult geo{1, kCheckNames[0], false, {}, {}};
  geo.metrics.push_back(metric("max_cos_residual", r.max_angle_residual, "<=", c.tol.angle));
  geo.metrics.push_back(metric("illegal_pairs", static_cast<double>(r.illegal.size()), "==", 0));
  geo.metrics.push_back(metric("max_plane_residual", r.max_plane_residual, "<=", c.tol.angle));
  const double l = cov.spacing;
  const double a = l * (3 - std::sqrt(7.0)) / 2;
  const double closed = std::max({std::abs(cov.params.vertex_radius - l / std::sqrt(3.0)),
                                  std::abs(cov.params.offset - a),
                                  std::abs(cov.params.face_radius - a * std::sqrt(2.0 / 3.0)),
                                  std::abs(cov.params.center_radius - a / std::sqrt(3.0))});
  geo.metrics.push_back(metric("closed_form_error", closed, "<=", c.tol.angle));
  geo.notes.push_back(std::to_string(r.adjacency_count) + " adjacent pairs, " +
                      std::to_string(r.pairs_checked) + " pairs checked");
  for (std::size_t i = 0; i < std::min<std::size_t>(r.illegal.size(), 5); ++i)
    geo.notes.push_back("illegal: " + r.illegal[i]);

  CheckResult cv{2, kCheckNames[1], false, {}, {}};
  cv.metrics.push_back(metric("coverage", r.coverage(), "==", 1.0));
  cv.metrics.push_back(metric("misses", static_cast<double>(r.misses), "==", 0));
  cv.notes.push_back(std::to_string(r.samples) + " samples over " +
                     std::to_string(cov.surface.faces.size()) + " faces");
  return {finish(std::move(geo)), finish(std::move(cv))};
}

CheckResult coxeter_check(State& s) {
  const RunConfig& c = s.cfg;
  s.group = assemble_group(*s.cover);
  const ReflectionGroup& g = *s.group;
  const int faces = static_cast<int>(s.cover->surface.faces.size());
  const int face = c.patch_face < 0 ? faces / 2 : c.patch_face;
  if (face >= faces)
    throw std::invalid_argument("patch_face " + std::to_string(face) + " exceeds face count");
  s.patch = face_patch(*s.cover, face);

  CheckResult r{3, kCheckNames[2], false, {}, {}};
  const RelationReport rel = coxeter_suite(g);
  r.metrics.push_back(metric("max_relation_residual", rel.max_residual, "<=", c.tol.relation));
  r.metrics.push_back(metric("min_lower_power_distance", rel.min_lower_power, ">", c.tol.lower_power));
  r.metrics.push_back(metric("relation_failures", static_cast<double>(rel.failures.size()), "==", 0));
  s.note("coxeter suite: " + std::to_string(rel.pairs) + " pairs");
  const DriftReport d = drift_scan(g, s.patch, c.max_length);
  r.metrics.push_back(metric("max_form_drift", d.max_drift, "<=", c.tol.drift));
  r.notes.push_back(std::to_string(rel.pairs) + " finite-order pairs");
  r.notes.push_back("drift over " + std::to_string(d.words) + " reduced words of length <= " +
                    std::to_string(c.max_length) + " on the patch of face " +
                    std::to_string(face) + "; worst word " + format_word(d.worst));
  s.note("drift scan: " + std::to_string(d.words) + " words");
  return finish(std::move(r));
}

CheckResult faithfulness_check(State& s) {
  const RunConfig& c = s.cfg;
  const ReflectionGroup& g = *s.group;
  CheckResult r{4, kCheckNames[3], false, {}, {}};
  const FaithfulnessReport f = faithfulness_scan(g, s.patch, c.faithfulness_length);
  r.metrics.push_back(metric("violations", static_cast<double>(f.violations.size()), "==", 0));
  r.metrics.push_back(metric("min_identity_gap", f.min_gap, ">", c.tol.identity_gap));
  r.metrics.push_back(metric("truncated", f.truncated ? 1 : 0, "==", 0));
  r.notes.push_back(std::to_string(f.abstract_elements) + " group elements up to length " +
                    std::to_string(c.faithfulness_length) + "; closest to identity " +
                    format_word(f.closest));
  for (std::size_t i = 0; i < std::min<std::size_t>(f.violations.size(), 5); ++i)
    r.notes.push_back("violation: " + f.violations[i]);

  int a = -1, b = -1;
  for (int i : s.patch)
    for (int j : s.patch)
      if (a < 0 && i < j && g.order(i, j) == 3) a = i, b = j;
  if (a < 0) {
    r.metrics.push_back(metric("dihedral_order", 0, "==", 6));
    r.notes.push_back("no pi/3 pair in the patch");
  } else {
    const Enumeration e = enumerate_words(g, {a, b}, 10);
    r.metrics.push_back(metric("dihedral_order", static_cast<double>(e.elements.size()), "==", 6));
    r.notes.push_back("dihedral subgroup on generators " + std::to_string(a) + ", " +
                      std::to_string(b));
  }
  s.note("faithfulness scan: " + std::to_string(f.abstract_elements) + " elements");
  return finish(std::move(r));
}

CheckResult nesting_check(State& s) {
  const RunConfig& c = s.cfg;
  const ReflectionGroup& g = *s.group;
  const int L = c.max_length;
  CheckResult r{5, kCheckNames[4], false, {}, {}};

  OrbitLimits first;
  first.max_generation = 1;
  first.branch_cap = 1;
  const double m1 = orbit_spheres(g, first).max_radius(1);

  OrbitLimits fl;
  fl.max_generation = L;
  fl.radius_floor = L >= 2 ? c.tol.decay * m1 : 0;
  s.floor_orbit = orbit_spheres(g, fl);
  const Orbit& o = s.floor_orbit;
  s.note("floor orbit: " + std::to_string(o.spheres.size()) + " spheres");
  const NestingReport n = verify_nesting(o);
  s.note("nesting verified");
  r.metrics.push_back(metric("containment_violations", static_cast<double>(n.violations), "==", 0));
  r.metrics.push_back(metric("order_violations", static_cast<double>(n.order_violations), "==", 0));
  r.metrics.push_back(metric("duplicates", static_cast<double>(n.duplicates), "==", 0));
  r.metrics.push_back(metric("truncated", o.truncated ? 1 : 0, "==", 0));
  double rise = 0;
  for (int k = 1; k <= L; ++k) rise = std::max(rise, o.max_radius(k) - o.max_radius(k - 1));
  r.metrics.push_back(metric("max_radius_increase", rise, "<=", 0));
  if (L >= 2) {
    r.metrics.push_back(metric("generation_L_max_radius", o.max_radius(L), "<=", c.tol.decay * m1));
    r.notes.push_back("children below the floor " + std::to_string(fl.radius_floor) +
                      " are not materialized; the floor bounds every unlisted sphere");
  } else {
    r.notes.push_back("decay bound needs L >= 2");
  }
  std::ostringstream sizes;
  for (int k = 0; k <= L; ++k) sizes << (k ? " " : "") << o.generation_size(k);
  r.notes.push_back("generation sizes " + sizes.str() + "; generation-1 max radius " +
                    std::to_string(m1));

  OrbitLimits bl;
  bl.max_generation = L + 1;
  bl.branch_cap = c.beam;
  bl.roots = g.amalgams.empty() ? std::vector<int>{0} : g.amalgams.front();
  s.beam_orbit = orbit_spheres(g, bl);
  const Orbit& b = s.beam_orbit;
  const NestingReport bn = verify_nesting(b);
  r.metrics.push_back(metric("beam_nesting_violations",
                             static_cast<double>(bn.violations + bn.order_violations + bn.duplicates),
                             "==", 0));
  s.cut = cut_cloud(b, L);
  const PointCloud next = cut_cloud(b, L + 1);
  const double h = std::max(hausdorff_one_sided(s.cut, next), hausdorff_one_sided(next, s.cut));
  r.metrics.push_back(metric("hausdorff_step", h, "<=", cut_radius(b, L)));
  r.notes.push_back("deep orbit: " + std::to_string(b.spheres.size()) + " spheres, " +
                    std::to_string(c.beam) + " largest children per sphere");
  s.note("deep orbit and hausdorff step");
  return finish(std::move(r));
}

CheckResult domain_check(State& s) {
  const RunConfig& c = s.cfg;
  const ReflectionGroup& g = *s.group;
  CheckResult r{6, kCheckNames[5], false, {}, {}};
  const DomainReport d = fundamental_domain_check(g, c.domain_samples, c.seed);
  r.metrics.push_back(metric("violations", static_cast<double>(d.violations), "==", 0));
  r.metrics.push_back(metric("samples", static_cast<double>(d.samples), ">=",
                             static_cast<double>(c.domain_samples)));
  r.notes.push_back(std::to_string(d.generators) + " generators, " +
                    std::to_string(d.rejected) + " candidates rejected");
  s.note("fundamental domain: " + std::to_string(d.samples) + " samples");

  OrbitLimits none;
  none.max_generation = 0;
  s.stages = polyhedron_stages(g, orbit_spheres(g, none), c.stages);
  std::size_t mismatch = 0;
  for (const auto& st : s.stages) mismatch += st.side_count != st.recount;
  r.metrics.push_back(metric("stage_count_mismatches", static_cast<double>(mismatch), "==", 0));
  s.note("polyhedron stages: " + std::to_string(s.stages.size()));
  return finish(std::move(r));
}

CheckResult loxodromic_check(State& s) {
  const RunConfig& c = s.cfg;
  const int L = c.max_length;
  CheckResult r{7, kCheckNames[6], false, {}, {}};
  if (L < 1) {
    r.notes.push_back("not applicable: loxodromic words need L >= 1");
    return finish(std::move(r));
  }
  const LoxodromicReport lx = loxodromic_points(*s.group, s.beam_orbit, L, c.loxodromics, c.seed);
  s.lox_cloud = lx.cloud;
  const double eps = c.epsilon > 0 ? c.epsilon : cut_radius(s.beam_orbit, L);
  const auto d = distances_to_cloud(lx.cloud, s.cut);
  const double worst = d.empty() ? INFINITY : *std::max_element(d.begin(), d.end());
  r.metrics.push_back(metric("points", static_cast<double>(lx.cloud.points.size()), ">=",
                             static_cast<double>(c.loxodromics)));
  r.metrics.push_back(metric("max_distance_to_cloud", worst, "<=", eps));
  r.notes.push_back(std::to_string(lx.candidates) + " candidates, " +
                    std::to_string(lx.skipped) + " skipped; eigenvector agreement " +
                    std::to_string(lx.max_disagreement));
  s.note("loxodromic points: " + std::to_string(lx.cloud.points.size()));
  return finish(std::move(r));
}

CheckResult bending_check(State& s) {
  const RunConfig& c = s.cfg;
  const ReflectionGroup& g = *s.group;
  CheckResult r{8, kCheckNames[7], false, {}, {}};
  const BendingLocus l = bending_locus(g, c.bend_amalgam);
  const BendingSweep sw = bending_sweep(g, c.bend_amalgam, c.bend_angles, c.bend_probe);
  r.metrics.push_back(metric("max_relation_residual", sw.max_relation, "<=", c.tol.relation));
  r.metrics.push_back(metric("max_commutation_residual", sw.max_commutation, "<=", c.tol.commutation));
  const double change = std::abs(sw.witness.lambda_t - sw.witness.lambda0);
  r.metrics.push_back(metric("crossing_lambda_change", change, ">", c.tol.lambda_change));
  r.metrics.push_back(metric("locus_radius_error", std::abs(l.radius - l.edge / std::sqrt(6.0)),
                             "<=", c.tol.angle));
  r.metrics.push_back(metric("locus_orthogonality",
                             *std::max_element(l.orthogonality.begin(), l.orthogonality.end()),
                             "<=", c.tol.angle));
  r.notes.push_back("amalgam " + std::to_string(c.bend_amalgam) + ", crossing word " +
                    format_word(sw.witness.word));
  for (const auto& f : sw.failures) r.notes.push_back(f);

  s.bent_gens = l.gamma;
  for (int k : sw.witness.word) s.bent_gens.push_back(k);
  for (double t : c.bend_angles) s.bent.push_back(bend(g, c.bend_amalgam, t));
  s.note("bending sweep");
  return finish(std::move(r));
}

CheckResult invariants_check(State& s) {
  const RunConfig& c = s.cfg;
  CheckResult r{9, kCheckNames[8], false, {}, {}};
  const LaurentPolynomial tref({1, -1, 1}), fig({1, -3, 1});
  json polys;
  double units_at_one = 1;
  for (const auto& name : presentation_presets()) {
    const LaurentPolynomial d = alexander_polynomial(presentation_preset(name));
    polys[name] = d.to_string();
    const BigInt v = d.at_one();
    if (v != 1 && v != -1) units_at_one = 0;
  }
  const auto delta = [](const char* n) { return alexander_polynomial(presentation_preset(n)); };
  r.metrics.push_back(metric("trefoil_exact", delta("trefoil") == tref ? 1 : 0, "==", 1));
  r.metrics.push_back(metric("figure_eight_exact", delta("figure-eight") == fig ? 1 : 0, "==", 1));
  r.metrics.push_back(metric("connected_sum_exact",
                             delta("trefoil-sum") == tref * tref ? 1 : 0, "==", 1));
  r.metrics.push_back(metric("all_delta_at_one_unit", units_at_one, "==", 1));
  const Verdict unknot = nontriviality_verdict(delta("unknot"), 0);
  r.metrics.push_back(metric("unknot_trivial", unknot.nontrivial ? 0 : 1, "==", 1));

  const LaurentPolynomial base = alexander_polynomial(presentation_preset(c.presentation));
  double law = 1;
  json stages = json::array();
  for (int i = 0; i <= 6; ++i) {
    const LaurentPolynomial p = stage_polynomial(base, i);
    if (p.degree() != (base.degree() << i)) law = 0;
    stages.push_back({{"i", i}, {"degree", p.degree()}, {"polynomial", p.to_string()}});
  }
  r.metrics.push_back(metric("stage_degree_law", law, "==", 1));
  const Verdict v = nontriviality_verdict(base, 6);
  r.notes.push_back(c.presentation + ": " + base.to_string() + " -> " + v.label);

  json stage_rows = json::array();
  for (const auto& k : stage_report(s.stages, base))
    stage_rows.push_back({{"i", k.i},
                          {"knot", k.description},
                          {"sides", k.side_count},
                          {"chambers", k.chambers},
                          {"polynomial", k.polynomial.to_string()}});
  s.alexander = {{"presets", polys},
                 {"base", c.presentation},
                 {"stage_polynomials", stages},
                 {"verdict", {{"label", v.label}, {"cited", v.cited}}},
                 {"knot_stages", stage_rows}};
  s.note("invariants");
  return finish(std::move(r));
}

void write_bundle(State& s, Bundle& b) {
  const RunConfig& c = s.cfg;
  Writer w(c.out_dir);
  w.json_file("config.json", config_object(c));
  json checks = json::array();
  for (const auto& ch : b.checks) checks.push_back(check_object(ch));
  w.json_file("checks.json", {{"config", config_object(c)},
                              {"halted", b.halted},
                              {"checks", checks}});
  w.file("summary.md", [&](std::ostream& o) {
    o << "# Run summary\n\ninput: " << c.input << ", k = " << c.refinement
      << ", L = " << c.max_length << ", seed = " << c.seed << "\n\n";
    if (!b.halted.empty()) o << "halted: " << b.halted << "\n\n";
    o << "| # | check | result |\n|---|---|---|\n";
    for (const auto& ch : b.checks)
      o << "| " << ch.id << " | " << ch.name << " | " << (ch.pass ? "PASS" : "FAIL") << " |\n";
    o << "\nEvery metric with its bound is in checks.json.\n";
  });
  if (s.cover)
    w.file("cover.tsv", [&](std::ostream& o) {
      o << "# index role host x1 x2 x3 x4 radius\n" << std::setprecision(17);
      for (std::size_t i = 0; i < s.cover->balls.size(); ++i) {
        const Ball& bl = s.cover->balls[i];
        o << i << ' ' << role_name(bl.role) << ' ' << bl.host;
        for (int d = 0; d < 4; ++d) o << ' ' << bl.center[d];
        o << ' ' << bl.radius << '\n';
      }
    });
  if (!s.beam_orbit.spheres.empty())
    w.file("orbit.tsv", [&](std::ostream& o) { write_orbit(o, s.beam_orbit); });
  if (!s.floor_orbit.spheres.empty())
    w.file("generations.tsv", [&](std::ostream& o) {
      o << "# orbit generation count max_radius\n" << std::setprecision(17);
      for (const auto* orb : {&s.floor_orbit, &s.beam_orbit}) {
        const char* tag = orb == &s.floor_orbit ? "floor" : "deep";
        for (std::size_t k = 0; k + 1 < orb->generation_start.size(); ++k)
          o << tag << ' ' << k << ' ' << orb->generation_size(static_cast<int>(k)) << ' '
            << orb->max_radius(static_cast<int>(k)) << '\n';
      }
    });
  if (!s.stages.empty())
    w.file("stages.tsv", [&](std::ostream& o) { write_stages(o, s.stages); });
  if (!s.cut.points.empty())
    w.file("cloud.csv", [&](std::ostream& o) { write_cloud(o, s.cut, ExportFormat::Csv); });
  if (!s.lox_cloud.points.empty())
    w.file("loxodromic.csv",
           [&](std::ostream& o) { write_cloud(o, s.lox_cloud, ExportFormat::Csv); });
  if (!s.bent.empty())
    w.file("bent.tsv", [&](std::ostream& o) {
      for (const auto& bt : s.bent) write_bent(o, bt, s.bent_gens);
    });
  if (!s.alexander.is_null()) w.json_file("alexander.json", s.alexander);
  b.files = w.names();
}

}  // namespace

std::string config_json(const RunConfig& cfg) { return config_object(cfg).dump(1); }

RunConfig config_from_json(const std::string& text) {
  RunConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  auto get = [&](const json& src, const std::string& key, auto& field) {
    try {
      src.at(key).get_to(field);
    } catch (const json::exception& e) {
      throw std::invalid_argument("config: " + key + ": " + e.what());
    }
  };
  for (const auto& [key, val] : j.items()) {
    if (key == "input") get(j, key, c.input);
    else if (key == "refinement") get(j, key, c.refinement);
    else if (key == "max_length") get(j, key, c.max_length);
    else if (key == "epsilon") get(j, key, c.epsilon);
    else if (key == "stages") get(j, key, c.stages);
    else if (key == "bend_amalgam") get(j, key, c.bend_amalgam);
    else if (key == "bend_angles") get(j, key, c.bend_angles);
    else if (key == "bend_probe") get(j, key, c.bend_probe);
    else if (key == "out_dir") get(j, key, c.out_dir);
    else if (key == "seed") get(j, key, c.seed);
    else if (key == "coverage_samples") get(j, key, c.coverage_samples);
    else if (key == "domain_samples") get(j, key, c.domain_samples);
    else if (key == "loxodromics") get(j, key, c.loxodromics);
    else if (key == "faithfulness_length") get(j, key, c.faithfulness_length);
    else if (key == "patch_face") get(j, key, c.patch_face);
    else if (key == "beam") get(j, key, c.beam);
    else if (key == "presentation") get(j, key, c.presentation);
    else if (key == "tol") {
      if (!val.is_object()) throw std::invalid_argument("config: tol must be an object");
      for (const auto& [tk, tv] : val.items()) {
        (void)tv;
        if (tk == "angle") get(val, tk, c.tol.angle);
        else if (tk == "relation") get(val, tk, c.tol.relation);
        else if (tk == "drift") get(val, tk, c.tol.drift);
        else if (tk == "identity_gap") get(val, tk, c.tol.identity_gap);
        else if (tk == "lower_power") get(val, tk, c.tol.lower_power);
        else if (tk == "decay") get(val, tk, c.tol.decay);
        else if (tk == "commutation") get(val, tk, c.tol.commutation);
        else if (tk == "lambda_change") get(val, tk, c.tol.lambda_change);
        else throw std::invalid_argument("config: unknown key tol." + tk);
      }
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }
  return c;
}

std::vector<std::string> complex_presets() { return {"spun-trefoil", "dumbbell"}; }

CubeComplex load_input(const std::string& input) {
  if (input == "spun-trefoil") return spun_trefoil_preset();
  if (input == "dumbbell") return dumbbell_fixture();
  return load_complex(input);
}

bool Metric::holds() const {
  if (relation == "<=") return value <= bound;
  if (relation == "<") return value < bound;
  if (relation == ">=") return value >= bound;
  if (relation == ">") return value > bound;
  if (relation == "==") return value == bound;
  return false;
}

bool Bundle::all_pass() const {
  return halted.empty() && !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Bundle run_pipeline(const RunConfig& cfg, std::ostream* log) {
  validate_config(cfg);
  State s(cfg, log);
  Bundle b;
  using Stage = std::vector<CheckResult> (*)(State&);
  const std::vector<std::pair<const char*, Stage>> stages = {
      {"build and validate", [](State& st) { return cover_checks(st); }},
      {"relations", [](State& st) { return std::vector<CheckResult>{coxeter_check(st)}; }},
      {"enumerate", [](State& st) { return std::vector<CheckResult>{faithfulness_check(st)}; }},
      {"orbit", [](State& st) { return std::vector<CheckResult>{nesting_check(st)}; }},
      {"domain", [](State& st) { return std::vector<CheckResult>{domain_check(st)}; }},
      {"limit set", [](State& st) { return std::vector<CheckResult>{loxodromic_check(st)}; }},
      {"bend", [](State& st) { return std::vector<CheckResult>{bending_check(st)}; }},
      {"invariants", [](State& st) { return std::vector<CheckResult>{invariants_check(st)}; }},
  };
  for (const auto& [name, run] : stages) {
    try {
      for (auto& c : run(s)) b.checks.push_back(std::move(c));
    } catch (const std::exception& e) {
      b.halted = std::string(name) + ": " + e.what();
    }
    if (!b.halted.empty()) break;
  }
  if (!b.halted.empty()) {
    for (int id = static_cast<int>(b.checks.size()) + 1; id <= 9; ++id)
      b.checks.push_back({id, kCheckNames[id - 1], false, {}, {"not run: halted at " + b.halted}});
    s.note("halted: " + b.halted);
  }
  write_bundle(s, b);
  return b;
}

std::string check_line(const CheckResult& c) {
  std::ostringstream os;
  os << (c.pass ? "PASS" : "FAIL") << ' ' << c.id << ' ' << c.name << ':';
  for (const auto& m : c.metrics)
    os << ' ' << m.name << '=' << std::setprecision(6) << m.value << ' ' << m.relation << ' '
       << m.bound << ';';
  if (c.metrics.empty() && !c.notes.empty()) os << ' ' << c.notes.front();
  return os.str();
}

CheckResult reproducibility_check(const RunConfig& cfg, const Bundle& first) {
  CheckResult r{10, kCheckNames[9], false, {}, {}};
  const fs::path dir(cfg.out_dir);
  fs::path aside = dir;
  aside += ".first";
  fs::remove_all(aside);
  fs::rename(dir, aside);
  const Bundle second = run_pipeline(cfg, nullptr);
  std::vector<std::string> differ = compare_bundles(aside.string(), dir.string(), first.files);
  for (const auto& f : second.files)
    if (std::find(first.files.begin(), first.files.end(), f) == first.files.end())
      differ.push_back(f);
  fs::remove_all(aside);
  r.metrics.push_back(metric("files_compared", static_cast<double>(first.files.size()), ">", 0));
  r.metrics.push_back(metric("files_differing", static_cast<double>(differ.size()), "==", 0));
  for (const auto& f : differ) r.notes.push_back("differs: " + f);
  return finish(std::move(r));
}

std::vector<std::string> compare_bundles(const std::string& a, const std::string& b,
                                         const std::vector<std::string>& files) {
  std::vector<std::string> differ;
  for (const auto& f : files) {
    std::ifstream x(fs::path(a) / f, std::ios::binary), y(fs::path(b) / f, std::ios::binary);
    if (!x || !y) {
      differ.push_back(f);
      continue;
    }
    const std::string sx((std::istreambuf_iterator<char>(x)), std::istreambuf_iterator<char>());
    const std::string sy((std::istreambuf_iterator<char>(y)), std::istreambuf_iterator<char>());
    if (sx != sy) differ.push_back(f);
  }
  return differ;
}

}  // namespace wildknot
