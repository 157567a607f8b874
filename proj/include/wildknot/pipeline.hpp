#pragma once

// End-to-end run: cover, group, orbit, limit set, bending and invariants,
// written as a report bundle with one pass/fail entry per acceptance check.

#include "wildknot/bending.hpp"
#include "wildknot/invariants.hpp"
#include "wildknot/limitset.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wildknot {

struct Tolerances {
  double angle = 1e-9;          // cover cos residual, closed forms, locus radius
  double relation = 1e-8;       // Coxeter residual
  double drift = 1e-7;          // Lorentz form drift
  double identity_gap = 0.1;    // faithfulness
  double lower_power = 0.5;     // no smaller Coxeter power near I
  double decay = 0.2;           // generation-L max / generation-1 max
  double commutation = 1e-9;    // bending vs Gamma_j
  double lambda_change = 1e-4;  // crossing word eigenvalue change
};

struct RunConfig {
  std::string input = "spun-trefoil";  // preset name or complex file
  int refinement = 0;
  int max_length = 8;         // L: drift words, orbit depth, cut depth
  double epsilon = 0;         // containment radius; 0 = max generation-L radius
  int stages = 5;             // polyhedron stages
  int bend_amalgam = 1;
  std::vector<double> bend_angles{0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  double bend_probe = 0.2;
  std::string out_dir = "wildknot-out";
  std::uint64_t seed = 1;
  std::size_t coverage_samples = 10000;  // per face
  std::size_t domain_samples = 100000;
  std::size_t loxodromics = 100;
  int faithfulness_length = 6;
  int patch_face = -1;        // face patch for drift and faithfulness; -1 = middle
  int beam = 3;               // children kept per sphere in the deep orbit
  std::string presentation = "trefoil";  // base knot group for the stage law
  Tolerances tol;
};

/// Throws std::invalid_argument naming the offending field.
void validate_config(const RunConfig& cfg);
/// Canonical JSON echo of every field.
std::string config_json(const RunConfig& cfg);
/// Inverse of config_json; missing keys keep their defaults, unknown keys
/// throw std::invalid_argument.
RunConfig config_from_json(const std::string& text);

/// Preset name ("spun-trefoil", "dumbbell") or a path to a complex file.
CubeComplex load_input(const std::string& input);
std::vector<std::string> complex_presets();

struct Metric {
  std::string name;
  double value = 0;
  std::string relation;  // "<=", "<", ">=", ">", "=="
  double bound = 0;
  bool holds() const;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::vector<Metric> metrics;
  std::vector<std::string> notes;
};

struct Bundle {
  std::vector<CheckResult> checks;
  std::vector<std::string> files;  // written, relative to out_dir
  std::string halted;              // cause when a stage threw
  bool all_pass() const;
};

/// Runs every check and writes the bundle into cfg.out_dir (created).  A
/// stage that throws halts the downstream stages; its check and all later
/// ones are recorded as failures with the cause.  `log` receives progress.
Bundle run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr);

/// One line per check: "PASS 3 coxeter: ..." or "FAIL ...".
std::string check_line(const CheckResult& c);

/// Moves the bundle of `first` aside, runs the same config again into the
/// same directory and compares every file byte for byte.
CheckResult reproducibility_check(const RunConfig& cfg, const Bundle& first);

/// Files of two bundle directories compared byte for byte; returns the
/// names that differ or are missing.
std::vector<std::string> compare_bundles(const std::string& a, const std::string& b,
                                         const std::vector<std::string>& files);

}  // namespace wildknot
