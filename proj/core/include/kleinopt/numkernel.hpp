#pragma once

#include <Eigen/Dense>

namespace kleinopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Central tolerance record. Every numeric threshold used by the kernels and
/// the manifold layer lives here so property tests have a single tuning point.
struct Tolerances {
  double symmetry = 1e-12;       // accepted asymmetry for "symmetric" inputs
  double decomposition = 1e-10;  // residual bound for SVD/QR/polar multiply-back
  double membership = 1e-8;      // manifold membership residual
  double tangent = 1e-10;        // tangent-condition residual
  double relative_rank = 1e-13;  // sigma_i / sigma_max below this counts as zero
  double spd_floor = 1e-12;      // eigenvalue floor used when re-projecting SPD
};

const Tolerances& tolerances();

/// e^A for square A via scaling-and-squaring with a fixed-order Pade
/// approximant. Exact (to roundoff) for nilpotent A.
Matrix matrix_exp(const Matrix& a);

/// Principal matrix logarithm via inverse scaling-and-squaring. Requires an
/// invertible input with no eigenvalue on the closed negative real axis.
Matrix matrix_log(const Matrix& a);

/// Symmetric positive definite square root: returns symmetric R with R*R = s.
Matrix spd_sqrt(const Matrix& s);

/// Symmetric positive definite inverse square root.
Matrix spd_inv_sqrt(const Matrix& s);

struct ThinSvd {
  Matrix u;      // m x r, orthonormal columns
  Vector sigma;  // r, descending, non-negative
  Matrix v;      // n x r, orthonormal columns
};

/// Thin SVD, singular values sorted descending.
ThinSvd thin_svd(const Matrix& a);

struct ThinQr {
  Matrix q;  // m x r, orthonormal columns
  Matrix r;  // r x n, upper triangular, non-negative diagonal
};

/// Thin QR with the sign convention diag(R) >= 0, so the factorization is a
/// deterministic function of the input.
ThinQr qr_thin(const Matrix& a);

struct PolarFactors {
  Matrix q;  // orthogonal
  Matrix s;  // symmetric positive definite
};

/// Polar decomposition a = q*s of an invertible square matrix. det(a) = 1
/// implies det(q) = det(s) = 1.
PolarFactors polar_decompose(const Matrix& a);

/// Exact exponential of a strictly upper triangular (nilpotent) matrix,
/// evaluated as the finite power sum.
Matrix nilpotent_exp(const Matrix& strictly_upper);

/// Exact logarithm of a unipotent matrix (unit diagonal, zero below),
/// evaluated as the finite Mercator series of the nilpotent part.
Matrix unipotent_log(const Matrix& unipotent);

/// Commutator a*b - b*a.
Matrix lie_bracket(const Matrix& a, const Matrix& b);

bool is_finite(const Matrix& a);

}  // namespace kleinopt
