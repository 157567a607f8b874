#pragma once

// Hand-rolled generators and independent Euclidean formulas used as oracles.

#include "wildknot/group.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace testkit {

using wildknot::Vec4;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g_); }
  Vec4 point(double box) {
    return Vec4(uniform(-box, box), uniform(-box, box), uniform(-box, box), uniform(-box, box));
  }
  Vec4 direction() {
    Vec4 v;
    do v = point(1.0);
    while (v.norm() < 1e-3);
    return v.normalized();
  }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

/// Inversion of p in the sphere (c, r).
inline Vec4 invert_point(const Vec4& c, double r, const Vec4& p) {
  const Vec4 d = p - c;
  return c + (r * r / d.squaredNorm()) * d;
}

struct Ball {
  Vec4 c;
  double r;
};

/// Image of the sphere (c, rho) under inversion in (C, R); the sphere must
/// not pass through C.
inline Ball invert_ball(const Vec4& C, double R, const Vec4& c, double rho) {
  const double k = R * R / ((c - C).squaredNorm() - rho * rho);
  return {C + k * (c - C), std::abs(k) * rho};
}

/// cos of the exterior dihedral angle of two intersecting spheres.
inline double exterior_cos(const Ball& a, const Ball& b) {
  const double d2 = (a.c - b.c).squaredNorm();
  return (d2 - a.r * a.r - b.r * b.r) / (2 * a.r * b.r);
}

/// Dilation of the product of reflections in two disjoint or nested spheres
/// with inversive distance delta >= 1: the translation length along the
/// common perpendicular is 2 arccosh(delta).
inline double dilation_from_delta(double delta) {
  const double e = delta + std::sqrt(delta * delta - 1);
  return e * e;
}

const wildknot::BallCover& preset_cover();
const wildknot::ReflectionGroup& preset_group();
const wildknot::BallCover& dumbbell_cover();
const wildknot::ReflectionGroup& dumbbell_group();

}  // namespace testkit
