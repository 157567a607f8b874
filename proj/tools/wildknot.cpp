// Command-line front end: build, validate, enumerate, limitset, bend,
// alexander and report.  Subcommands hand artifacts to each other on disk.

#include "wildknot/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace wildknot;

namespace {

struct Common {
  std::string input = "spun-trefoil";
  int k = 0;
  std::string out = "wildknot-out";
};

void add_common(CLI::App* app, Common& c, bool with_out = true) {
  app->add_option("--preset,--input", c.input,
                  "Complex preset (spun-trefoil, dumbbell) or complex file")
      ->capture_default_str();
  app->add_option("-k,--refinement", c.k, "Cover refinement")->capture_default_str()
      ->check(CLI::Range(0, 4));
  if (with_out)
    app->add_option("-o,--out", c.out, "Output directory")
        ->envname("WILDKNOT_OUT")
        ->capture_default_str();
}

fs::path ensure_dir(const std::string& d) {
  fs::create_directories(d);
  return fs::path(d);
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

int cmd_build(const Common& c) {
  const CubeComplex cx = load_input(c.input);
  const BallCover cov = build_cover(cx, c.k);
  const fs::path dir = ensure_dir(c.out);
  {
    auto f = open_out(dir / "complex.cubes");
    write_complex(f, cx);
  }
  {
    auto f = open_out(dir / "cover.tsv");
    f << "# index role host x1 x2 x3 x4 radius\n" << std::setprecision(17);
    for (std::size_t i = 0; i < cov.balls.size(); ++i) {
      const Ball& b = cov.balls[i];
      f << i << ' ' << role_name(b.role) << ' ' << b.host;
      for (int d = 0; d < 4; ++d) f << ' ' << b.center[d];
      f << ' ' << b.radius << '\n';
    }
  }
  std::cout << "complex: " << cx.chain().size() << " cubes\n"
            << "surface: " << cov.surface.faces.size() << " faces, chi = "
            << cov.surface.euler_characteristic() << "\n"
            << "cover: " << cov.balls.size() << " balls, " << cov.adjacency.size()
            << " adjacencies, " << cov.amalgam_rings.size() << " amalgams\n"
            << "wrote " << (dir / "complex.cubes").string() << ", " << (dir / "cover.tsv").string()
            << "\n";
  return 0;
}

int cmd_validate(const Common& c, std::size_t samples, std::uint64_t seed, double tol) {
  const CubeComplex cx = load_input(c.input);
  const BallCover cov = build_cover(cx, c.k);
  // Residual table by target angle and role pair.
  struct Row {
    std::size_t n = 0;
    double worst = 0;
  };
  std::map<std::string, Row> table;
  for (const auto& a : cov.adjacency) {
    const double cosr = -inversive_product(cov.balls[a.i].sphere, cov.balls[a.j].sphere);
    const double res = std::abs(cosr - std::cos(M_PI / a.m));
    std::string ri = role_name(cov.balls[a.i].role), rj = role_name(cov.balls[a.j].role);
    if (rj < ri) std::swap(ri, rj);
    Row& r = table["pi/" + std::to_string(a.m) + " " + ri + "-" + rj];
    ++r.n;
    r.worst = std::max(r.worst, res);
  }
  std::cout << std::left << std::setw(28) << "angle roles" << std::setw(10) << "pairs"
            << "max |cos residual|\n";
  for (const auto& [k, r] : table)
    std::cout << std::setw(28) << k << std::setw(10) << r.n << std::setprecision(3) << r.worst
              << "\n";
  const CoverReport rep = validate_cover(cov, samples, seed);
  std::cout << "max residual " << rep.max_angle_residual << " (tol " << tol << ")\n"
            << "illegal pairs " << rep.illegal.size() << "\n"
            << "coverage " << std::setprecision(10) << rep.coverage() << " over " << rep.samples
            << " samples, " << rep.misses << " misses\n";
  for (const auto& s : rep.illegal) std::cout << "illegal: " << s << "\n";
  const bool ok = rep.ok(tol);
  std::cout << (ok ? "valid" : "INVALID") << "\n";
  return ok ? 0 : 1;
}

int cmd_enumerate(const Common& c, int L, int face, std::vector<int> gens, int stages,
                  bool sides) {
  const BallCover cov = build_cover(load_input(c.input), c.k);
  const ReflectionGroup g = assemble_group(cov);
  if (gens.empty()) {
    const int faces = static_cast<int>(cov.surface.faces.size());
    const int f = face < 0 ? faces / 2 : face;
    if (f >= faces) throw std::invalid_argument("face out of range");
    gens = face_patch(cov, f);
  }
  for (int k : gens)
    if (k < 0 || static_cast<std::size_t>(k) >= g.size())
      throw std::invalid_argument("generator " + std::to_string(k) + " out of range");
  const Enumeration e = enumerate_words(g, gens, L);
  const fs::path dir = ensure_dir(c.out);
  {
    auto f = open_out(dir / "elements.tsv");
    f << "# index word distance_to_identity\n" << std::setprecision(17);
    for (std::size_t i = 0; i < e.elements.size(); ++i)
      f << i << ' ' << format_word(e.elements[i].word) << ' '
        << e.elements[i].map.distance_to_identity() << '\n';
  }
  std::cout << "generators:";
  for (int k : gens) std::cout << ' ' << k;
  std::cout << "\nelements up to length " << L << ": " << e.elements.size() << " ("
            << e.words_generated << " words, " << e.duplicates << " merged"
            << (e.truncated ? ", truncated" : "") << ")\n";
  if (e.elements.size() <= 12)
    for (const auto& el : e.elements) std::cout << "  " << format_word(el.word) << "\n";
  if (stages > 0) {
    OrbitLimits none;
    none.max_generation = 0;
    const auto st = polyhedron_stages(g, orbit_spheres(g, none), stages);
    auto f = open_out(dir / "stages.tsv");
    write_stages(f, st);
    write_stages(std::cout, st);
    if (sides) {
      auto s = open_out(dir / "sides.tsv");
      write_sides(s, st.back());
    }
  }
  return 0;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("bad number: " + tok);
    out.push_back(v);
  }
  return out;
}

struct LimitOpts {
  int L = 8;
  int beam = 3;
  std::string format = "csv";
  std::size_t lox = 100;
  std::uint64_t seed = 1;
  int axis = -1;
  double value = 0, thickness = 0.5;
};

int cmd_limitset(const Common& c, const LimitOpts& o) {
  const ExportFormat fmt = parse_format(o.format);
  const BallCover cov = build_cover(load_input(c.input), c.k);
  const ReflectionGroup g = assemble_group(cov);
  OrbitLimits lim;
  lim.max_generation = o.L;
  lim.branch_cap = o.beam;
  lim.roots = g.amalgams.empty() ? std::vector<int>{0} : g.amalgams.front();
  const Orbit orb = orbit_spheres(g, lim);
  const PointCloud cut = cut_cloud(orb, o.L);
  const fs::path dir = ensure_dir(c.out);
  {
    auto f = open_out(dir / "orbit.tsv");
    write_orbit(f, orb);
  }
  export_cloud(cut, fmt, (dir / ("cloud." + o.format)).string());
  std::cout << "orbit: " << orb.spheres.size() << " spheres, cut at depth " << o.L << ": "
            << cut.points.size() << " points, radius " << cut_radius(orb, o.L) << "\n";
  if (o.lox > 0 && o.L > 0) {
    const LoxodromicReport lx = loxodromic_points(g, orb, o.L, o.lox, o.seed);
    export_cloud(lx.cloud, fmt, (dir / ("loxodromic." + o.format)).string());
    const auto d = distances_to_cloud(lx.cloud, cut);
    double worst = 0;
    for (double x : d) worst = std::max(worst, x);
    std::cout << "loxodromic: " << lx.cloud.points.size() << " points, max distance to cloud "
              << worst << "\n";
  }
  if (o.axis >= 0) {
    const SliceCloud sl = slice_cloud(cut, o.axis, o.value, o.thickness);
    export_slice(sl, fmt, (dir / ("slice." + o.format)).string());
    std::cout << "slice: " << sl.points.size() << " points"
              << (sl.notice.empty() ? "" : " (" + sl.notice + ")") << "\n";
  }
  return 0;
}

int cmd_bend(const Common& c, int j, const std::string& angles, double probe, bool all) {
  const BallCover cov = build_cover(load_input(c.input), c.k);
  const ReflectionGroup g = assemble_group(cov);
  const std::vector<double> ts = parse_list(angles);
  const BendingLocus l = bending_locus(g, j);
  const BendingSweep sw = bending_sweep(g, j, ts, probe);
  std::cout << "locus: center " << l.center.transpose() << ", radius " << std::setprecision(12)
            << l.radius << " (edge/sqrt6 = " << l.edge / std::sqrt(6.0) << ")\n";
  std::cout << std::setprecision(4) << "t        relation    commutation\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    std::cout << std::left << std::setw(9) << ts[i] << std::setw(12) << sw.relation_residual[i]
              << sw.commutation[i] << "\n";
  std::cout << std::setprecision(12) << "crossing word " << format_word(sw.witness.word)
            << ": lambda " << sw.witness.lambda0 << " -> " << sw.witness.lambda_t << " at t = "
            << probe << "\n";
  for (const auto& f : sw.failures) std::cout << "failure: " << f << "\n";
  const fs::path dir = ensure_dir(c.out);
  auto f = open_out(dir / "bent.tsv");
  std::vector<int> gens;
  if (!all) {
    gens = l.gamma;
    for (int k : sw.witness.word) gens.push_back(k);
  }
  for (double t : ts) write_bent(f, bend(g, j, t), gens);
  return sw.ok() ? 0 : 1;
}

int cmd_alexander(const std::string& preset, const std::string& file, int stages,
                  const std::string& write) {
  const GroupPresentation p =
      file.empty() ? presentation_preset(preset) : load_presentation(file);
  const LaurentPolynomial d = alexander_polynomial(p);
  std::cout << d.to_string() << "\n";
  if (stages > 0) {
    const Verdict v = nontriviality_verdict(d, stages);
    for (int i = 0; i <= stages; ++i)
      std::cout << "K_" << i << ": degree " << v.stage_degrees[i] << "\n";
    std::cout << v.label << "\n";
    for (const auto& s : v.cited) std::cout << "cited: " << s << "\n";
  }
  if (!write.empty()) {
    auto f = open_out(write);
    write_presentation(f, p);
  }
  return 0;
}

int cmd_report(RunConfig cfg, const std::string& config_file, bool repro, bool quiet) {
  if (!config_file.empty()) {
    std::ifstream f(config_file);
    if (!f) throw std::runtime_error("cannot read " + config_file);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string out = cfg.out_dir;
    cfg = config_from_json(ss.str());
    cfg.out_dir = out;
  }
  const Bundle b = run_pipeline(cfg, quiet ? nullptr : &std::cerr);
  bool ok = b.all_pass();
  for (const auto& c : b.checks) std::cout << check_line(c) << "\n";
  if (!b.halted.empty()) std::cout << "halted: " << b.halted << "\n";
  if (repro) {
    const CheckResult c = reproducibility_check(cfg, b);
    std::cout << check_line(c) << "\n";
    ok = ok && c.pass;
  }
  std::cout << "bundle: " << cfg.out_dir << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflection-group limit sets of ribbon 2-knots"};
  app.require_subcommand(1);

  Common cb, cv, ce, cl, cbend;
  auto* build = app.add_subcommand("build", "Build the cube complex and its ball cover");
  add_common(build, cb);

  auto* validate = app.add_subcommand("validate", "Angle residuals, disjointness and coverage");
  add_common(validate, cv, false);
  std::size_t samples = 10000;
  std::uint64_t vseed = 1;
  double vtol = 1e-9;
  validate->add_option("--samples", samples, "Coverage samples per face")->capture_default_str();
  validate->add_option("--seed", vseed)->capture_default_str();
  validate->add_option("--tol", vtol, "Angle tolerance")->capture_default_str();

  auto* enumerate = app.add_subcommand("enumerate", "Group elements and polyhedron stages");
  add_common(enumerate, ce);
  int max_len = 4, face = -1, n_stages = 0;
  std::vector<int> gens;
  bool sides = false;
  enumerate->add_option("--max-len,-L", max_len, "Word length cap")->capture_default_str()
      ->check(CLI::Range(0, 12));
  enumerate->add_option("--face", face, "Face patch (-1 = middle face)")->capture_default_str();
  enumerate->add_option("--gens", gens, "Explicit generator indices");
  enumerate->add_option("--stages", n_stages, "Polyhedron stages to build")
      ->check(CLI::Range(0, 12));
  enumerate->add_flag("--sides", sides, "Dump the sides of the last stage");

  auto* limitset = app.add_subcommand("limitset", "Orbit spheres, point clouds and slices");
  add_common(limitset, cl);
  LimitOpts lo;
  limitset->add_option("-L,--depth", lo.L, "Orbit depth")->capture_default_str()
      ->check(CLI::Range(0, 12));
  limitset->add_option("--beam", lo.beam, "Children kept per sphere")->capture_default_str()
      ->check(CLI::Range(1, 8));
  limitset->add_option("--format", lo.format, "csv, ply or json")->capture_default_str();
  limitset->add_option("--loxodromic", lo.lox, "Loxodromic fixed points")->capture_default_str();
  limitset->add_option("--seed", lo.seed)->capture_default_str();
  limitset->add_option("--slice-axis", lo.axis, "Slice axis 0-3 (default: no slice)");
  limitset->add_option("--slice-value", lo.value)->capture_default_str();
  limitset->add_option("--slice-thickness", lo.thickness)->capture_default_str();

  auto* bendc = app.add_subcommand("bend", "Bending deformation along an amalgam");
  add_common(bendc, cbend);
  int amalgam = 1;
  std::string angles = "0,0.05,0.1,0.15,0.2,0.25,0.3";
  double probe = 0.2;
  bool all = false;
  bendc->add_option("-j,--amalgam", amalgam)->capture_default_str();
  bendc->add_option("-t,--angles", angles, "Comma-separated angles")->capture_default_str();
  bendc->add_option("--probe", probe, "Angle for the crossing-word test")->capture_default_str();
  bendc->add_flag("--all", all, "Dump every generator image");

  auto* alex = app.add_subcommand("alexander", "Alexander polynomial of a knot group");
  std::string apreset = "trefoil", afile, awrite;
  int astages = 0;
  auto* ap = alex->add_option("--preset", apreset, "trefoil, figure-eight, trefoil-sum, "
                                                   "spun-trefoil, unknot")
                 ->capture_default_str();
  alex->add_option("--file", afile, "Presentation file")->excludes(ap);
  alex->add_option("--stages", astages, "Iterated self connected sums to report")
      ->check(CLI::Range(0, 12));
  alex->add_option("--write", awrite, "Write the presentation to a file");

  auto* report = app.add_subcommand("report", "Full pipeline with the report bundle");
  RunConfig cfg;
  std::string config_file, rangles;
  bool repro = false, quiet = false;
  report->add_option("--config", config_file, "JSON config (keys as in config.json)");
  report->add_option("--preset,--input", cfg.input)->capture_default_str();
  report->add_option("-k,--refinement", cfg.refinement)->capture_default_str();
  report->add_option("-L,--max-len", cfg.max_length)->capture_default_str();
  report->add_option("--epsilon", cfg.epsilon, "0 = max generation-L radius")
      ->capture_default_str();
  report->add_option("--stages", cfg.stages)->capture_default_str();
  report->add_option("-j,--amalgam", cfg.bend_amalgam)->capture_default_str();
  report->add_option("-t,--angles", rangles, "Comma-separated bending angles");
  report->add_option("--probe", cfg.bend_probe)->capture_default_str();
  report->add_option("-o,--out", cfg.out_dir)->envname("WILDKNOT_OUT")->capture_default_str();
  report->add_option("--seed", cfg.seed)->capture_default_str();
  report->add_option("--coverage-samples", cfg.coverage_samples)->capture_default_str();
  report->add_option("--domain-samples", cfg.domain_samples)->capture_default_str();
  report->add_option("--loxodromics", cfg.loxodromics)->capture_default_str();
  report->add_option("--faithfulness-len", cfg.faithfulness_length)->capture_default_str();
  report->add_option("--face", cfg.patch_face)->capture_default_str();
  report->add_option("--beam", cfg.beam)->capture_default_str();
  report->add_option("--presentation", cfg.presentation)->capture_default_str();
  report->add_option("--tol-angle", cfg.tol.angle)->capture_default_str();
  report->add_option("--tol-relation", cfg.tol.relation)->capture_default_str();
  report->add_option("--tol-drift", cfg.tol.drift)->capture_default_str();
  report->add_flag("--repro", repro, "Run twice and compare the bundles");
  report->add_flag("-q,--quiet", quiet, "No progress on stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_build(cb);
    if (validate->parsed()) return cmd_validate(cv, samples, vseed, vtol);
    if (enumerate->parsed()) return cmd_enumerate(ce, max_len, face, gens, n_stages, sides);
    if (limitset->parsed()) return cmd_limitset(cl, lo);
    if (bendc->parsed()) return cmd_bend(cbend, amalgam, angles, probe, all);
    if (alex->parsed()) return cmd_alexander(apreset, afile, astages, awrite);
    if (report->parsed()) {
      if (!rangles.empty()) cfg.bend_angles = parse_list(rangles);
      return cmd_report(cfg, config_file, repro, quiet);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
