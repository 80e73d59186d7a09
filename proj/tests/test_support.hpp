// Shared test helpers: independent oracles the library is checked against.
// Everything here recomputes results through routes the implementation does
// not take (power series, frame embeddings, exhaustive enumeration,
// multiplicative updates), so agreement is meaningful.
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "kleinopt/geometry.hpp"
#include "kleinopt/random.hpp"

namespace testsupport {

using kleinopt::Matrix;
using kleinopt::Vector;

// Truncated power series for e^A.
inline Matrix series_exp(const Matrix& a, int terms) {
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  for (int k = 1; k <= terms; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  return result;
}

// Series with two squarings, accurate for norms up to ~5.
inline Matrix scaled_series_exp(const Matrix& a) {
  Matrix e = series_exp(a / 4.0, 30);
  e = e * e;
  return e * e;
}

inline Matrix gaussian(int rows, int cols, kleinopt::RandomSource& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

// Orthonormal completion of the columns of p.
inline Matrix complement(const Matrix& p) {
  Eigen::HouseholderQR<Matrix> qr(p);
  Matrix full = qr.householderQ() * Matrix::Identity(p.rows(), p.rows());
  return full.rightCols(p.rows() - p.cols());
}

// Generic embedded matrix-exponential construction of the exp map for the
// coset geometries: lift the tangent into the frame [p | p_perp], take the
// so(n) exponential by power series, act on the origin block.
inline Matrix embedded_exp_frame(const Matrix& p, const Matrix& omega, bool include_a_block) {
  const Eigen::Index n = p.rows();
  const Eigen::Index k = p.cols();
  const Matrix perp = complement(p);
  const Matrix a = include_a_block ? Matrix(p.transpose() * omega) : Matrix(Matrix::Zero(k, k));
  const Matrix c = perp.transpose() * omega;
  Matrix mu = Matrix::Zero(n, n);
  mu.topLeftCorner(k, k) = 0.5 * (a - a.transpose());
  mu.bottomLeftCorner(n - k, k) = c;
  mu.topRightCorner(k, n - k) = -c.transpose();
  Matrix frame(n, n);
  frame.leftCols(k) = p;
  frame.rightCols(n - k) = perp;
  const Matrix e = scaled_series_exp(mu);
  return frame * e.leftCols(k);
}

// Embedded oracle for the SPD exponential: congruence to the identity, then
// the series exponential of the symmetric middle factor.
inline Matrix embedded_exp_spd(const Matrix& p, const Matrix& omega) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
  const Matrix s = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
                   eig.eigenvectors().transpose();
  const Matrix si = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    eig.eigenvectors().transpose();
  return s * scaled_series_exp(si * omega * si) * s;
}

// Embedded oracle for the translation group: the (n+1) x (n+1) homogeneous
// block exponential.
inline Matrix embedded_exp_translation(const Matrix& p, const Matrix& omega) {
  const Eigen::Index n = p.rows();
  Matrix tau = Matrix::Zero(n + 1, n + 1);
  tau.topRightCorner(n, 1) = omega;
  const Matrix e = series_exp(tau, 4);
  return p + e.topRightCorner(n, 1);
}

// Sum of the k smallest eigenvalues of a symmetric matrix.
inline double rayleigh_oracle(const Matrix& a, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  return eig.eigenvalues().head(k).sum();
}

// Closed-form Procrustes optimum of |A - QB|_F^2 over SO(n).
inline double procrustes_oracle(const Matrix& a, const Matrix& b) {
  const kleinopt::ThinSvd svd = kleinopt::thin_svd(a * b.transpose());
  const Eigen::Index n = a.rows();
  const double det_uv = (svd.u * svd.v.transpose()).determinant();
  double best = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) best += svd.sigma[i];
  best += svd.sigma[n - 1] * (det_uv > 0.0 ? 1.0 : -1.0);
  return a.squaredNorm() + b.squaredNorm() - 2.0 * best;
}

// Exhaustive non-negative least squares for one column with two variables:
// enumerate every support, solve the unconstrained problem on it, keep the
// best feasible candidate.
inline Vector exhaustive_nnls_2(const Matrix& w, const Vector& b) {
  Vector best = Vector::Zero(2);
  double best_res = b.squaredNorm();
  for (int mask = 1; mask < 4; ++mask) {
    std::vector<int> support;
    for (int i = 0; i < 2; ++i)
      if (mask & (1 << i)) support.push_back(i);
    Matrix wp(w.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) wp.col(static_cast<Eigen::Index>(s)) = w.col(support[s]);
    const Vector z = wp.colPivHouseholderQr().solve(b);
    bool feasible = true;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      if (z[i] < -1e-12) feasible = false;
    if (!feasible) continue;
    const double res = (b - wp * z).squaredNorm();
    if (res < best_res - 1e-14) {
      best_res = res;
      best.setZero();
      for (std::size_t s = 0; s < support.size(); ++s) best[support[s]] = std::max(0.0, z[static_cast<Eigen::Index>(s)]);
    }
  }
  return best;
}

// Semi-NMF baseline (multiplicative updates): W unconstrained least squares,
// H updated by the standard split-gradient rule. Used as the reference when
// the spread constraint is inactive.
inline double multiplicative_update_baseline(const Matrix& x, int k, int iterations,
                                             kleinopt::RandomSource& rng) {
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  Matrix h(k, m);
  for (int i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < m; ++j) h(i, j) = 0.1 + rng.uniform01();
  Matrix w = Matrix::Zero(n, k);
  const double tiny = 1e-12;
  for (int it = 0; it < iterations; ++it) {
    // W step: exact least squares given H.
    w = x * h.transpose() * (h * h.transpose() + tiny * Matrix::Identity(k, k)).inverse();
    // H step: multiplicative update with positive/negative parts.
    const Matrix wtx = w.transpose() * x;
    const Matrix wtw = w.transpose() * w;
    const Matrix wtx_pos = 0.5 * (wtx.cwiseAbs() + wtx);
    const Matrix wtx_neg = 0.5 * (wtx.cwiseAbs() - wtx);
    const Matrix wtw_pos = 0.5 * (wtw.cwiseAbs() + wtw);
    const Matrix wtw_neg = 0.5 * (wtw.cwiseAbs() - wtw);
    const Matrix numer = wtx_pos + wtw_neg * h;
    const Matrix denom = wtx_neg + wtw_pos * h;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index j = 0; j < h.cols(); ++j)
        h(i, j) *= std::sqrt((numer(i, j) + tiny) / (denom(i, j) + tiny));
  }
  w = x * h.transpose() * (h * h.transpose() + tiny * Matrix::Identity(k, k)).inverse();
  return (x - w * h).squaredNorm();
}

}  // namespace testsupport
