#include "kleinopt/numkernel.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace kleinopt {

const Tolerances& tolerances() {
  static const Tolerances tols;
  return tols;
}

bool is_finite(const Matrix& a) { return a.allFinite(); }

namespace {

void require_finite(const Matrix& a, const char* op) {
  if (!a.allFinite()) {
    throw std::invalid_argument(std::string(op) + ": non-finite input");
  }
}

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch, matrix must be square");
  }
}

// Eigendecomposition of a symmetric matrix, with the symmetry residual checked
// against the shared tolerance record.
Eigen::SelfAdjointEigenSolver<Matrix> symmetric_eig(const Matrix& s, const char* op) {
  require_square(s, op);
  require_finite(s, op);
  const double scale = std::max(1.0, s.norm());
  if ((s - s.transpose()).norm() > 1e4 * tolerances().symmetry * scale) {
    throw std::invalid_argument(std::string(op) + ": matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error(std::string(op) + ": eigendecomposition failed");
  }
  return eig;
}

}  // namespace

Matrix matrix_exp(const Matrix& a) {
  require_square(a, "matrix_exp");
  require_finite(a, "matrix_exp");
  return a.exp();
}

Matrix matrix_log(const Matrix& a) {
  require_square(a, "matrix_log");
  require_finite(a, "matrix_log");
  Eigen::EigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("matrix_log: eigendecomposition failed");
  }
  const auto& lambda = eig.eigenvalues();
  const double scale = std::max(1.0, a.norm());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double re = lambda[i].real();
    const double im = lambda[i].imag();
    if (std::abs(lambda[i]) < 1e-14 * scale) {
      throw std::domain_error("matrix_log: singular input");
    }
    if (re < 0.0 && std::abs(im) < 1e-14 * std::abs(re)) {
      throw std::domain_error("matrix_log: outside principal branch");
    }
  }
  return a.log();
}

Matrix spd_sqrt(const Matrix& s) {
  auto eig = symmetric_eig(s, "spd_sqrt");
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("spd_sqrt: matrix is not positive definite");
  }
  Matrix r = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
             eig.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

Matrix spd_inv_sqrt(const Matrix& s) {
  auto eig = symmetric_eig(s, "spd_inv_sqrt");
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error("spd_inv_sqrt: matrix is not positive definite");
  }
  Matrix r = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
             eig.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

ThinSvd thin_svd(const Matrix& a) {
  require_finite(a, "thin_svd");
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return ThinSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

ThinQr qr_thin(const Matrix& a) {
  require_finite(a, "qr_thin");
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index r = std::min(m, n);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(m, r);
  Matrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  // Fix signs so diag(R) >= 0.
  for (Eigen::Index i = 0; i < r; ++i) {
    if (rr(i, i) < 0.0) {
      rr.row(i) = -rr.row(i);
      q.col(i) = -q.col(i);
    }
  }
  return ThinQr{std::move(q), std::move(rr)};
}

PolarFactors polar_decompose(const Matrix& a) {
  require_square(a, "polar_decompose");
  require_finite(a, "polar_decompose");
  ThinSvd svd = thin_svd(a);
  const double sigma_max = svd.sigma.size() > 0 ? svd.sigma[0] : 0.0;
  if (sigma_max <= 0.0 || svd.sigma.minCoeff() < tolerances().relative_rank * sigma_max) {
    throw std::domain_error("polar_decompose: singular input");
  }
  Matrix q = svd.u * svd.v.transpose();
  Matrix s = svd.v * svd.sigma.asDiagonal() * svd.v.transpose();
  return PolarFactors{std::move(q), 0.5 * (s + s.transpose())};
}

Matrix nilpotent_exp(const Matrix& strictly_upper) {
  require_square(strictly_upper, "nilpotent_exp");
  require_finite(strictly_upper, "nilpotent_exp");
  const Eigen::Index n = strictly_upper.rows();
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    term = (term * strictly_upper) / static_cast<double>(k);
    result += term;
  }
  return result;
}

Matrix unipotent_log(const Matrix& unipotent) {
  require_square(unipotent, "unipotent_log");
  require_finite(unipotent, "unipotent_log");
  const Eigen::Index n = unipotent.rows();
  const Matrix nil = unipotent - Matrix::Identity(n, n);
  Matrix result = Matrix::Zero(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    term = term * nil;
    result += (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k) * term;
  }
  return result;
}

Matrix lie_bracket(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace kleinopt
