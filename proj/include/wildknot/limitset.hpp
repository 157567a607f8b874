#pragma once

// Point-cloud approximations of the limit set: small orbit-sphere centers,
// loxodromic fixed points, stage summaries, 3D slices and file export.

#include "wildknot/group.hpp"
#include "wildknot/invariants.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace wildknot {

enum class PointSource { SphereCenter, LoxodromicFixed };
const char* source_name(PointSource s);

struct CloudPoint {
  Vec4 p;
  PointSource source = PointSource::SphereCenter;
  long seq = -1;    // orbit index for sphere centers
  Word word;        // the word for loxodromic fixed points
  int generation = 0;
};

struct PointCloud {
  std::vector<CloudPoint> points;
  std::size_t infinite = 0;  // points at infinity left out
  std::string notice;        // set when the cloud is empty for a reason
};

/// Centers of orbit spheres with radius < eps, in orbit order.
PointCloud cloud_from_orbit(const Orbit& o, double eps);

/// Depth-L cut of the nesting tree: generation-L spheres plus shallower
/// spheres without children.  Every limit point reached by the tree lies in
/// one of these spheres.
PointCloud cut_cloud(const Orbit& o, int L);
/// Largest radius among the spheres of cut_cloud(o, L).
double cut_radius(const Orbit& o, int L);

/// max over a of the distance to the nearest point of b (infinity when b is
/// empty and a is not).
double hausdorff_one_sided(const PointCloud& a, const PointCloud& b);

struct LoxodromicReport {
  PointCloud cloud;
  std::size_t requested = 0;
  std::size_t candidates = 0;     // eligible orbit spheres
  std::size_t skipped = 0;        // not loxodromic
  double max_disagreement = 0;    // eigenvector vs iterated fixed point
  double max_outside = -std::numeric_limits<double>::infinity();  // max |p-c| - r
};

/// Attracting fixed points of h = R_{w1} ... R_{wk} R_b for n orbit spheres
/// w(s_b) of generation L whose first letter is disjoint from b (sampled
/// with the seed).  h maps the exterior of s_b into w(s_b), so the fixed
/// point lies in that sphere.
LoxodromicReport loxodromic_points(const ReflectionGroup& g, const Orbit& o, int L,
                                   std::size_t n, std::uint64_t seed);

/// Distance from every point of `pts` to the nearest point of `cloud`.
std::vector<double> distances_to_cloud(const PointCloud& pts, const PointCloud& cloud);

struct KnotStage {
  int i = 0;
  std::string description;  // K_i = K_{i-1} # K_{i-1}
  std::size_t side_count = 0;
  std::size_t chambers = 0;
  LaurentPolynomial polynomial;  // stage polynomial of the base knot
};

std::vector<KnotStage> stage_report(const std::vector<PolyhedronStage>& stages,
                                    const LaurentPolynomial& base);

struct SlicePoint {
  Eigen::Vector3d p;
  PointSource source = PointSource::SphereCenter;
  long seq = -1;
  int generation = 0;
};

struct SliceCloud {
  int axis = 3;
  double value = 0, thickness = 0;
  std::vector<SlicePoint> points;
  std::string notice;
};

/// Points with |x_axis - value| <= thickness, projected to the other three
/// coordinates.  axis is 0-based.
SliceCloud slice_cloud(const PointCloud& c, int axis, double value, double thickness);

enum class ExportFormat { Csv, Ply, Json };
ExportFormat parse_format(const std::string& s);

/// CSV: header "x1,x2,x3,x4,source,seq,word,generation".  PLY 1.0 ascii with
/// float64 vertex coordinates and an int generation property.  JSON: an
/// object with "points" and "infinite".
void write_cloud(std::ostream& out, const PointCloud& c, ExportFormat f);
void write_slice(std::ostream& out, const SliceCloud& c, ExportFormat f);
PointCloud read_cloud_csv(std::istream& in);
void export_cloud(const PointCloud& c, ExportFormat f, const std::string& path);
void export_slice(const SliceCloud& c, ExportFormat f, const std::string& path);

}  // namespace wildknot
