#pragma once

#include <cstdint>
#include <random>

#include "kleinopt/geometry.hpp"

namespace kleinopt {

/// Deterministic random source: a fixed engine (mt19937_64) combined with
/// fixed uniform/normal transforms, so identical seeds give identical sample
/// streams on every platform.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  std::uint64_t next_u64() {
    ++draws_;
    return engine_();
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0, 1).
  double uniform_open01() {
    double u = uniform01();
    while (u == 0.0) u = uniform01();
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (fixed draw count: two uniforms per call).
  double normal() {
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/// Configuration of the black-box group-element generator: the geometry and
/// the cap R on the radius argument.
struct GeneratorConfig {
  KleinGeometry geometry;
  double radius_cap;  // R > 0; must not exceed rho when rho is finite

  GeneratorConfig(KleinGeometry g, double cap);
};

/// A generated group element together with its inverse and their distances to
/// the identity, so the group-only solver never touches the tangent space.
struct GroupSample {
  Point element;
  Point inverse;
  double norm_to_identity;          // |g - e|_F
  double inverse_norm_to_identity;  // |g^-1 - e|_F
};

/// Random tangent at base with metric norm in (0, s): isotropic Gaussian
/// direction over the orthonormal tangent basis, radius uniform in (0, s).
TangentVector random_tangent(const Point& base, double s, RandomSource& rng);

/// The generator B^r: a random element with |g - e|_F strictly below r,
/// every element of the r-ball reachable. Draws an algebra element with
/// |omega| < t where t solves t e^t = r, and exponentiates from the identity.
/// On quotient geometries the element is an SO(n) mover.
GroupSample random_group_element(const GeneratorConfig& cfg, double r, RandomSource& rng);

/// Solves t * e^t = r for t >= 0 by bisection (to 1e-12).
double solve_radius_bound(double r);

/// A random point of the geometry, for starting points and tests.
Point random_point(const KleinGeometry& geometry, RandomSource& rng);

}  // namespace kleinopt
