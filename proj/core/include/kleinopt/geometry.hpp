#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kleinopt/numkernel.hpp"

namespace kleinopt {

enum class Space {
  Grassmannian,  // Gr(n,k): k-planes in R^n, orthonormal n x k representatives
  Stiefel,       // V(n,k): orthonormal k-frames in R^n
  GLplus,        // invertible n x n with positive determinant
  SL,            // determinant-one n x n
  SO,            // rotations
  SE,            // rigid motions, (n+1) x (n+1) homogeneous blocks
  SPD,           // symmetric positive definite, group law g (.) h = g^1/2 h g^1/2
  Unipotent,     // upper triangular with unit diagonal
  Translation,   // R^n as a group, points stored as n-vectors
  Sphere,        // unit vectors in R^n (the sphere S^{n-1})
};

/// A matrix manifold presented as a Klein geometry G/H: the space identifier,
/// its point and tangent representations, and the radius within which the
/// exponential map is a diffeomorphism.
class KleinGeometry {
 public:
  static KleinGeometry grassmannian(int n, int k);
  static KleinGeometry stiefel(int n, int k);
  static KleinGeometry gl_plus(int n);
  static KleinGeometry special_linear(int n);
  static KleinGeometry special_orthogonal(int n);
  static KleinGeometry special_euclidean(int n);
  static KleinGeometry spd(int n);
  static KleinGeometry unipotent(int n);
  static KleinGeometry translation(int n);
  static KleinGeometry sphere(int n);

  /// Lowercase names accepted from the CLI: grassmann, stiefel, so, se, spd,
  /// sl, glplus, unipotent, translation, sphere.
  static KleinGeometry from_name(const std::string& name, int n, int k = 0);

  Space space() const { return space_; }
  int n() const { return n_; }
  int k() const { return k_; }

  std::pair<int, int> point_shape() const;
  int tangent_dim() const;
  bool exp_surjective() const;

  /// Injectivity radius rho of the exponential map; +inf for the globally
  /// diffeomorphic cases, conservative defaults otherwise.
  double injectivity_radius() const { return rho_; }
  void set_injectivity_radius(double rho);

  /// True for the coset representations (Grassmannian, Stiefel, Sphere) whose
  /// points are moved by left-multiplying with SO(n) elements.
  bool is_quotient() const;

  std::string name() const;

  bool operator==(const KleinGeometry& other) const {
    return space_ == other.space_ && n_ == other.n_ && k_ == other.k_;
  }

 private:
  KleinGeometry(Space space, int n, int k, double rho);

  Space space_;
  int n_;
  int k_;
  double rho_;
};

/// A point of a Klein geometry in its matrix representation. On quotient
/// geometries an n x n matrix denotes a G-element mover (an SO(n) element
/// acting on the coset representatives) rather than a coset point.
struct Point {
  KleinGeometry geometry;
  Matrix value;
  // Number of exp_map applications along this point's lineage; used to
  // trigger periodic re-projection against floating-point drift.
  std::int64_t generation = 0;

  bool is_mover() const;
};

/// An element of the subspace m attached at a base point, stored in the
/// geometry's tangent representation (see the tangent conditions below).
struct TangentVector {
  KleinGeometry geometry;
  Point base;
  Matrix value;
};

/// Orthonormal bases (Frobenius inner product) for the algebra split
/// g = h (+) m in the embedded matrix representation.
struct AlgebraBasis {
  KleinGeometry geometry;
  std::vector<Matrix> h_basis;
  std::vector<Matrix> m_basis;
};

// --- construction ---

/// Wraps a matrix as a point after a shape check. Membership is not enforced
/// here; call check_membership for validation.
Point make_point(const KleinGeometry& geometry, Matrix value);

/// Identity element (group geometries) or origin representative (quotient
/// geometries: [I_k; 0] for Grassmannian/Stiefel, e_1 for the sphere).
Point identity_point(const KleinGeometry& geometry);

/// Wraps a matrix as a tangent vector after checking the tangent condition.
TangentVector make_tangent(const Point& base, Matrix value);

TangentVector zero_tangent(const Point& base);

// --- membership and equality ---

/// Residual of the geometry's membership test; 0 for exact members. For
/// quotient movers this is the SO(n) membership residual.
double check_membership(const Point& p);

/// Residual of the tangent condition of w at its base.
double tangent_residual(const TangentVector& w);

/// Point equality test. Grassmannian points compare as subspaces:
/// |p1 p1^T - p2 p2^T| <= tol.
bool points_equal(const Point& a, const Point& b, double tol);

// --- maps ---

/// Exponential map: traverses the geodesic / one-parameter subgroup from base
/// along w. Throws when |w| exceeds the injectivity radius on a geometry
/// whose exponential map is not surjective.
Point exp_map(const Point& base, const TangentVector& w);

/// Logarithm map, inverse of exp_map near the base. Unavailable on the
/// Stiefel manifold (no closed form).
TangentVector log_map(const Point& base, const Point& target);

/// Instrumentation: number of log_map invocations since the last reset. The
/// group-only descent procedure is required to keep this at zero.
std::uint64_t log_map_call_count();
void reset_log_map_call_count();

/// Left translation L_g(h). Group geometries use the group law (matrix
/// product, or g^1/2 h g^1/2 for SPD, addition for Translation). On quotient
/// geometries g must be an n x n mover with SO(n) membership.
Point left_translate(const Point& g, const Point& h);

/// Inverse group element; for quotient movers the transpose, for coset points
/// of symmetric quotients the geodesic reflection through the origin.
Point invert(const Point& g);

/// Orthogonal projection of an ambient matrix onto the tangent space at base
/// (orthogonal with respect to the geometry's metric). Idempotent.
TangentVector project_tangent(const Point& base, const Matrix& ambient);

// --- metric ---

double metric(const Point& base, const TangentVector& w1, const TangentVector& w2);
double tangent_norm(const TangentVector& w);

// --- algebra ---

/// Embedded h/m bases at the identity. |m_basis| equals tangent_dim. For SPD
/// the split is the one inherited from GL+(n)/SO(n) (h = so(n), m = sym(n)).
AlgebraBasis algebra_basis(const KleinGeometry& geometry);

/// Metric-orthonormal basis of the tangent space at an arbitrary base point,
/// in the tangent representation used by TangentVector.
std::vector<Matrix> tangent_basis(const Point& base);

/// SL(n) sampler from the polar-decomposition construction: returns
/// exp(skew) * exp(traceless_sym), which reaches every element of SL(n).
Point sl_sample(const Matrix& traceless_sym, const Matrix& skew);

/// Re-projects a drifted point back onto the manifold (QR for orthonormal
/// representations, symmetrization plus eigenvalue floor for SPD, ...).
Point reproject(const Point& p);

}  // namespace kleinopt
