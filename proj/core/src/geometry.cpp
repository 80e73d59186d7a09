#include "kleinopt/geometry.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace kleinopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::atomic<std::uint64_t> g_log_map_calls{0};

Matrix unit(int rows, int cols, int i, int j) {
  Matrix e = Matrix::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

double sym_residual(const Matrix& a) { return (a - a.transpose()).norm(); }
double skew_residual(const Matrix& a) { return (a + a.transpose()).norm(); }

// Columns spanning the orthogonal complement of the (orthonormal) columns of p.
Matrix orthogonal_complement(const Matrix& p) {
  Eigen::HouseholderQR<Matrix> qr(p);
  Matrix full = qr.householderQ() * Matrix::Identity(p.rows(), p.rows());
  return full.rightCols(p.rows() - p.cols());
}

Matrix symmetric_exp(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  Matrix r = eig.eigenvectors() * eig.eigenvalues().array().exp().matrix().asDiagonal() *
             eig.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

Matrix symmetric_log(const Matrix& s, const char* op) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::domain_error(std::string(op) + ": outside injectivity radius");
  }
  Matrix r = eig.eigenvectors() * eig.eigenvalues().array().log().matrix().asDiagonal() *
             eig.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

void require_same_geometry(const KleinGeometry& a, const KleinGeometry& b, const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": geometry mismatch");
  }
}

void require_tangent_at(const Point& base, const TangentVector& w, const char* op) {
  require_same_geometry(base.geometry, w.geometry, op);
  if (w.base.value.rows() != base.value.rows() || w.base.value.cols() != base.value.cols() ||
      (w.base.value - base.value).norm() > 1e-9 * std::max(1.0, base.value.norm())) {
    throw std::invalid_argument(std::string(op) + ": tangent is based at a different point");
  }
}

}  // namespace

// --- KleinGeometry ---

KleinGeometry::KleinGeometry(Space space, int n, int k, double rho)
    : space_(space), n_(n), k_(k), rho_(rho) {}

KleinGeometry KleinGeometry::grassmannian(int n, int k) {
  if (n < 2 || k < 1 || k >= n) throw std::invalid_argument("grassmannian: need 1 <= k < n, n >= 2");
  return KleinGeometry(Space::Grassmannian, n, k, M_PI / 2.0);
}

KleinGeometry KleinGeometry::stiefel(int n, int k) {
  if (n < 2 || k < 1 || k >= n) throw std::invalid_argument("stiefel: need 1 <= k < n, n >= 2");
  return KleinGeometry(Space::Stiefel, n, k, M_PI);
}

KleinGeometry KleinGeometry::gl_plus(int n) {
  if (n < 1) throw std::invalid_argument("gl_plus: need n >= 1");
  return KleinGeometry(Space::GLplus, n, 0, 1.0);
}

KleinGeometry KleinGeometry::special_linear(int n) {
  if (n < 2) throw std::invalid_argument("special_linear: need n >= 2");
  return KleinGeometry(Space::SL, n, 0, 1.0);
}

KleinGeometry KleinGeometry::special_orthogonal(int n) {
  if (n < 2) throw std::invalid_argument("special_orthogonal: need n >= 2");
  return KleinGeometry(Space::SO, n, 0, M_PI);
}

KleinGeometry KleinGeometry::special_euclidean(int n) {
  if (n < 1) throw std::invalid_argument("special_euclidean: need n >= 1");
  return KleinGeometry(Space::SE, n, 0, 1.0);
}

KleinGeometry KleinGeometry::spd(int n) {
  if (n < 1) throw std::invalid_argument("spd: need n >= 1");
  return KleinGeometry(Space::SPD, n, 0, kInf);
}

KleinGeometry KleinGeometry::unipotent(int n) {
  if (n < 2) throw std::invalid_argument("unipotent: need n >= 2");
  return KleinGeometry(Space::Unipotent, n, 0, 1.0);
}

KleinGeometry KleinGeometry::translation(int n) {
  if (n < 1) throw std::invalid_argument("translation: need n >= 1");
  return KleinGeometry(Space::Translation, n, 0, kInf);
}

KleinGeometry KleinGeometry::sphere(int n) {
  if (n < 2) throw std::invalid_argument("sphere: need n >= 2");
  return KleinGeometry(Space::Sphere, n, 0, M_PI);
}

KleinGeometry KleinGeometry::from_name(const std::string& name, int n, int k) {
  if (name == "grassmann") return grassmannian(n, k);
  if (name == "stiefel") return stiefel(n, k);
  if (name == "glplus") return gl_plus(n);
  if (name == "sl") return special_linear(n);
  if (name == "so") return special_orthogonal(n);
  if (name == "se") return special_euclidean(n);
  if (name == "spd") return spd(n);
  if (name == "unipotent") return unipotent(n);
  if (name == "translation") return translation(n);
  if (name == "sphere") return sphere(n);
  throw std::invalid_argument("unknown geometry name: " + name);
}

std::pair<int, int> KleinGeometry::point_shape() const {
  switch (space_) {
    case Space::Grassmannian:
    case Space::Stiefel:
      return {n_, k_};
    case Space::SE:
      return {n_ + 1, n_ + 1};
    case Space::Translation:
    case Space::Sphere:
      return {n_, 1};
    default:
      return {n_, n_};
  }
}

int KleinGeometry::tangent_dim() const {
  switch (space_) {
    case Space::Grassmannian: return k_ * (n_ - k_);
    case Space::Stiefel: return n_ * k_ - k_ * (k_ + 1) / 2;
    case Space::GLplus: return n_ * n_;
    case Space::SL: return n_ * n_ - 1;
    case Space::SO: return n_ * (n_ - 1) / 2;
    case Space::SE: return n_ * (n_ + 1) / 2;
    case Space::SPD: return n_ * (n_ + 1) / 2;
    case Space::Unipotent: return n_ * (n_ - 1) / 2;
    case Space::Translation: return n_;
    case Space::Sphere: return n_ - 1;
  }
  return 0;
}

bool KleinGeometry::exp_surjective() const {
  switch (space_) {
    case Space::Grassmannian:
    case Space::Stiefel:
    case Space::SO:
    case Space::SPD:
    case Space::Translation:
    case Space::Sphere:
      return true;
    default:
      return false;
  }
}

void KleinGeometry::set_injectivity_radius(double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("injectivity radius must be positive");
  rho_ = rho;
}

bool KleinGeometry::is_quotient() const {
  return space_ == Space::Grassmannian || space_ == Space::Stiefel || space_ == Space::Sphere;
}

std::string KleinGeometry::name() const {
  switch (space_) {
    case Space::Grassmannian: return "grassmann";
    case Space::Stiefel: return "stiefel";
    case Space::GLplus: return "glplus";
    case Space::SL: return "sl";
    case Space::SO: return "so";
    case Space::SE: return "se";
    case Space::SPD: return "spd";
    case Space::Unipotent: return "unipotent";
    case Space::Translation: return "translation";
    case Space::Sphere: return "sphere";
  }
  return "unknown";
}

// --- points ---

bool Point::is_mover() const {
  return geometry.is_quotient() && value.rows() == geometry.n() && value.cols() == geometry.n() &&
         geometry.point_shape() != std::pair<int, int>(geometry.n(), geometry.n());
}

Point make_point(const KleinGeometry& geometry, Matrix value) {
  const auto [rows, cols] = geometry.point_shape();
  const bool point_shape = value.rows() == rows && value.cols() == cols;
  const bool mover_shape =
      geometry.is_quotient() && value.rows() == geometry.n() && value.cols() == geometry.n();
  if (!point_shape && !mover_shape) {
    throw std::invalid_argument("make_point: shape mismatch for geometry " + geometry.name());
  }
  if (!value.allFinite()) {
    throw std::invalid_argument("make_point: non-finite entries");
  }
  return Point{geometry, std::move(value), 0};
}

Point identity_point(const KleinGeometry& geometry) {
  const int n = geometry.n();
  switch (geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel: {
      Matrix p = Matrix::Zero(n, geometry.k());
      p.topRows(geometry.k()).setIdentity();
      return Point{geometry, std::move(p), 0};
    }
    case Space::SE:
      return Point{geometry, Matrix::Identity(n + 1, n + 1), 0};
    case Space::Translation:
      return Point{geometry, Matrix::Zero(n, 1), 0};
    case Space::Sphere: {
      Matrix p = Matrix::Zero(n, 1);
      p(0, 0) = 1.0;
      return Point{geometry, std::move(p), 0};
    }
    default:
      return Point{geometry, Matrix::Identity(n, n), 0};
  }
}

double check_membership(const Point& p) {
  if (!p.value.allFinite()) return kInf;
  const Matrix& m = p.value;
  const int n = p.geometry.n();
  if (p.is_mover()) {
    return (m.transpose() * m - Matrix::Identity(n, n)).norm() + std::abs(m.determinant() - 1.0);
  }
  switch (p.geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel:
      return (m.transpose() * m - Matrix::Identity(p.geometry.k(), p.geometry.k())).norm();
    case Space::GLplus: {
      const double det = m.determinant();
      return det > 0.0 ? 0.0 : 1.0 + std::abs(det);
    }
    case Space::SL:
      return std::abs(m.determinant() - 1.0);
    case Space::SO:
      return (m.transpose() * m - Matrix::Identity(n, n)).norm() + std::abs(m.determinant() - 1.0);
    case Space::SE: {
      const Matrix o = m.topLeftCorner(n, n);
      double res = (o.transpose() * o - Matrix::Identity(n, n)).norm() +
                   std::abs(o.determinant() - 1.0);
      res += m.bottomRows(1).leftCols(n).norm() + std::abs(m(n, n) - 1.0);
      return res;
    }
    case Space::SPD: {
      double res = sym_residual(m);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()),
                                                Eigen::EigenvaluesOnly);
      const double lambda_min = eig.eigenvalues().minCoeff();
      if (lambda_min <= 0.0) res += 1.0 + std::abs(lambda_min);
      return res;
    }
    case Space::Unipotent: {
      double res = 0.0;
      for (int i = 0; i < n; ++i) {
        res += std::abs(m(i, i) - 1.0) * std::abs(m(i, i) - 1.0);
        for (int j = 0; j < i; ++j) res += m(i, j) * m(i, j);
      }
      return std::sqrt(res);
    }
    case Space::Translation:
      return 0.0;
    case Space::Sphere:
      return std::abs(m.norm() - 1.0);
  }
  return kInf;
}

bool points_equal(const Point& a, const Point& b, double tol) {
  if (!(a.geometry == b.geometry)) return false;
  if (a.geometry.space() == Space::Grassmannian && !a.is_mover() && !b.is_mover()) {
    return (a.value * a.value.transpose() - b.value * b.value.transpose()).norm() <= tol;
  }
  if (a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) return false;
  return (a.value - b.value).norm() <= tol;
}

// --- tangents ---

double tangent_residual(const TangentVector& w) {
  const Matrix& v = w.value;
  const Matrix& p = w.base.value;
  const int n = w.geometry.n();
  switch (w.geometry.space()) {
    case Space::Grassmannian:
      return (p.transpose() * v).norm();
    case Space::Stiefel:
      return (p.transpose() * v + v.transpose() * p).norm();
    case Space::GLplus:
      return 0.0;
    case Space::SL:
      return std::abs(v.trace());
    case Space::SO:
      return skew_residual(v);
    case Space::SE: {
      double res = skew_residual(v.topLeftCorner(n, n));
      res += v.bottomRows(1).norm();
      return res;
    }
    case Space::SPD:
      return sym_residual(v);
    case Space::Unipotent: {
      double res = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) res += v(i, j) * v(i, j);
      return std::sqrt(res);
    }
    case Space::Translation:
      return 0.0;
    case Space::Sphere:
      return std::abs((p.transpose() * v)(0, 0));
  }
  return kInf;
}

TangentVector make_tangent(const Point& base, Matrix value) {
  if (base.is_mover()) {
    throw std::invalid_argument("make_tangent: base must be a coset point, not a mover");
  }
  const auto [rows, cols] = base.geometry.point_shape();
  if (value.rows() != rows || value.cols() != cols) {
    throw std::invalid_argument("make_tangent: shape mismatch");
  }
  if (!value.allFinite()) {
    throw std::invalid_argument("make_tangent: non-finite entries");
  }
  TangentVector w{base.geometry, base, std::move(value)};
  const double scale = std::max(1.0, w.value.norm());
  if (tangent_residual(w) > 1e3 * tolerances().tangent * scale) {
    throw std::invalid_argument("make_tangent: tangent condition violated");
  }
  return w;
}

TangentVector zero_tangent(const Point& base) {
  const auto [rows, cols] = base.geometry.point_shape();
  return TangentVector{base.geometry, base, Matrix::Zero(rows, cols)};
}

TangentVector project_tangent(const Point& base, const Matrix& ambient) {
  const auto [rows, cols] = base.geometry.point_shape();
  if (ambient.rows() != rows || ambient.cols() != cols) {
    throw std::invalid_argument("project_tangent: shape mismatch");
  }
  const Matrix& p = base.value;
  const int n = base.geometry.n();
  Matrix v;
  switch (base.geometry.space()) {
    case Space::Grassmannian:
      v = ambient - p * (p.transpose() * ambient);
      break;
    case Space::Stiefel: {
      const Matrix ptz = p.transpose() * ambient;
      v = ambient - p * (0.5 * (ptz + ptz.transpose()));
      break;
    }
    case Space::GLplus:
      v = ambient;
      break;
    case Space::SL:
      v = ambient - (ambient.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
      break;
    case Space::SO:
      v = 0.5 * (ambient - ambient.transpose());
      break;
    case Space::SE: {
      v = Matrix::Zero(n + 1, n + 1);
      const Matrix a = ambient.topLeftCorner(n, n);
      v.topLeftCorner(n, n) = 0.5 * (a - a.transpose());
      v.topRightCorner(n, 1) = ambient.topRightCorner(n, 1);
      break;
    }
    case Space::SPD:
      v = 0.5 * (ambient + ambient.transpose());
      break;
    case Space::Unipotent:
      v = ambient.triangularView<Eigen::StrictlyUpper>();
      break;
    case Space::Translation:
      v = ambient;
      break;
    case Space::Sphere:
      v = ambient - p * (p.transpose() * ambient);
      break;
  }
  return TangentVector{base.geometry, base, std::move(v)};
}

// --- metric ---

double metric(const Point& base, const TangentVector& w1, const TangentVector& w2) {
  require_tangent_at(base, w1, "metric");
  require_tangent_at(base, w2, "metric");
  const Matrix& p = base.value;
  switch (base.geometry.space()) {
    case Space::Stiefel: {
      const Matrix mid = w2.value - 0.5 * p * (p.transpose() * w2.value);
      return (w1.value.transpose() * mid).trace();
    }
    case Space::SPD: {
      const Matrix pinv = spd_inv_sqrt(p);
      const Matrix a = pinv * w1.value * pinv;
      const Matrix b = pinv * w2.value * pinv;
      return (a * b).trace();
    }
    default:
      return (w1.value.array() * w2.value.array()).sum();
  }
}

double tangent_norm(const TangentVector& w) {
  return std::sqrt(std::max(0.0, metric(w.base, w, w)));
}

// --- exponential map ---

namespace {

Point finish_exp(const Point& base, Matrix value) {
  Point q{base.geometry, std::move(value), base.generation + 1};
  // Periodic drift control along long exp_map lineages.
  if (q.generation % 100 == 0) {
    Point fixed = reproject(q);
    fixed.generation = q.generation;
    return fixed;
  }
  return q;
}

Matrix grassmann_exp_value(const Matrix& p, const Matrix& omega) {
  const ThinSvd svd = thin_svd(omega);
  const Vector theta = svd.sigma;
  const Matrix cos_t = theta.array().cos().matrix().asDiagonal();
  const Matrix sin_t = theta.array().sin().matrix().asDiagonal();
  return (p * svd.v * cos_t + svd.u * sin_t) * svd.v.transpose();
}

Matrix stiefel_exp_value(const Matrix& p, const Matrix& omega) {
  const int k = static_cast<int>(p.cols());
  const Matrix pt_omega = p.transpose() * omega;
  const Matrix a = 0.5 * (pt_omega - pt_omega.transpose());
  const Matrix normal = omega - p * a;  // p_perp p_perp^T omega
  const ThinQr qr = qr_thin(normal);
  Matrix block = Matrix::Zero(2 * k, 2 * k);
  block.topLeftCorner(k, k) = a;
  block.topRightCorner(k, k) = -qr.r.transpose();
  block.bottomLeftCorner(k, k) = qr.r;
  const Matrix e = matrix_exp(block);
  Matrix frame(p.rows(), 2 * k);
  frame.leftCols(k) = p;
  frame.rightCols(k) = qr.q;
  return frame * e.leftCols(k);
}

Matrix sphere_exp_value(const Matrix& p, const Matrix& omega) {
  const double theta = omega.norm();
  if (theta < 1e-300) return p;
  const double sinc = theta < 1e-6 ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
  Matrix q = std::cos(theta) * p + sinc * omega;
  q /= q.norm();
  return q;
}

}  // namespace

Point exp_map(const Point& base, const TangentVector& w) {
  require_tangent_at(base, w, "exp_map");
  if (base.is_mover()) {
    throw std::invalid_argument("exp_map: base must be a coset point, not a mover");
  }
  if (w.value.isZero(0.0)) {
    return base;
  }
  if (!base.geometry.exp_surjective()) {
    const double rho = base.geometry.injectivity_radius();
    if (tangent_norm(w) >= rho) {
      throw std::domain_error("exp_map: tangent norm exceeds the injectivity radius");
    }
  }
  const Matrix& p = base.value;
  switch (base.geometry.space()) {
    case Space::Grassmannian:
      return finish_exp(base, grassmann_exp_value(p, w.value));
    case Space::Stiefel:
      return finish_exp(base, stiefel_exp_value(p, w.value));
    case Space::GLplus:
    case Space::SL:
    case Space::SO:
    case Space::SE:
      return finish_exp(base, p * matrix_exp(w.value));
    case Space::SPD: {
      const Matrix s = spd_sqrt(p);
      const Matrix si = spd_inv_sqrt(p);
      const Matrix inner = si * w.value * si;
      Matrix q = s * symmetric_exp(inner) * s;
      return finish_exp(base, 0.5 * (q + q.transpose()));
    }
    case Space::Unipotent:
      return finish_exp(base, p * nilpotent_exp(w.value));
    case Space::Translation:
      return finish_exp(base, p + w.value);
    case Space::Sphere:
      return finish_exp(base, sphere_exp_value(p, w.value));
  }
  throw std::logic_error("exp_map: unhandled geometry");
}

// --- logarithm map ---

std::uint64_t log_map_call_count() { return g_log_map_calls.load(); }
void reset_log_map_call_count() { g_log_map_calls.store(0); }

TangentVector log_map(const Point& base, const Point& target) {
  g_log_map_calls.fetch_add(1, std::memory_order_relaxed);
  require_same_geometry(base.geometry, target.geometry, "log_map");
  const Matrix& p = base.value;
  const Matrix& q = target.value;
  const int n = base.geometry.n();
  switch (base.geometry.space()) {
    case Space::Stiefel:
      throw std::domain_error("log_map: log unavailable for stiefel");
    case Space::Grassmannian: {
      const Matrix m = p.transpose() * q;
      Eigen::FullPivLU<Matrix> lu(m);
      if (!lu.isInvertible()) {
        throw std::domain_error("log_map: outside injectivity radius");
      }
      const Matrix x = (q - p * m) * lu.inverse();
      const ThinSvd svd = thin_svd(x);
      const Matrix atan_t = svd.sigma.array().atan().matrix().asDiagonal();
      Matrix omega = svd.u * atan_t * svd.v.transpose();
      return TangentVector{base.geometry, base, std::move(omega)};
    }
    case Space::Sphere: {
      const double c = std::clamp((p.transpose() * q)(0, 0), -1.0, 1.0);
      Matrix u = q - c * p;
      const double nu = u.norm();
      if (nu < 1e-14) {
        if (c > 0.0) return zero_tangent(base);
        throw std::domain_error("log_map: outside injectivity radius");
      }
      const double theta = std::acos(c);
      if (theta >= base.geometry.injectivity_radius()) {
        throw std::domain_error("log_map: outside injectivity radius");
      }
      return TangentVector{base.geometry, base, (theta / nu) * u};
    }
    case Space::SPD: {
      const Matrix s = spd_sqrt(p);
      const Matrix si = spd_inv_sqrt(p);
      const Matrix inner = si * q * si;
      Matrix omega = s * symmetric_log(inner, "log_map") * s;
      return TangentVector{base.geometry, base, 0.5 * (omega + omega.transpose())};
    }
    case Space::Translation:
      return TangentVector{base.geometry, base, q - p};
    case Space::SO: {
      const Matrix rel = p.transpose() * q;
      Matrix omega;
      try {
        omega = matrix_log(rel);
      } catch (const std::domain_error&) {
        throw std::domain_error("log_map: outside injectivity radius");
      }
      return TangentVector{base.geometry, base, 0.5 * (omega - omega.transpose())};
    }
    case Space::Unipotent: {
      Eigen::PartialPivLU<Matrix> lu(p);
      const Matrix rel = lu.solve(q);
      Matrix omega = unipotent_log(rel);
      omega = Matrix(omega.triangularView<Eigen::StrictlyUpper>());
      return TangentVector{base.geometry, base, std::move(omega)};
    }
    case Space::GLplus:
    case Space::SL:
    case Space::SE: {
      Eigen::PartialPivLU<Matrix> lu(p);
      const Matrix rel = lu.solve(q);
      Matrix omega;
      try {
        omega = matrix_log(rel);
      } catch (const std::domain_error&) {
        throw std::domain_error("log_map: outside injectivity radius");
      }
      if (base.geometry.space() == Space::SL) {
        omega -= (omega.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
      } else if (base.geometry.space() == Space::SE) {
        Matrix a = omega.topLeftCorner(n, n);
        omega.topLeftCorner(n, n) = 0.5 * (a - a.transpose());
        omega.bottomRows(1).setZero();
      }
      return TangentVector{base.geometry, base, std::move(omega)};
    }
  }
  throw std::logic_error("log_map: unhandled geometry");
}

// --- group operations ---

namespace {

Point finish_translate(const KleinGeometry& geometry, Matrix value, std::int64_t generation) {
  Point q{geometry, std::move(value), generation + 1};
  if (q.generation % 100 == 0) {
    Point fixed = reproject(q);
    fixed.generation = q.generation;
    return fixed;
  }
  return q;
}

}  // namespace

Point left_translate(const Point& g, const Point& h) {
  require_same_geometry(g.geometry, h.geometry, "left_translate");
  const std::int64_t generation = std::max(g.generation, h.generation);
  switch (g.geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel:
    case Space::Sphere: {
      if (!g.is_mover()) {
        throw std::invalid_argument("left_translate: quotient points are moved by SO(n) movers");
      }
      if (check_membership(g) > 10.0 * tolerances().membership) {
        throw std::invalid_argument("left_translate: non-orthogonal mover");
      }
      return finish_translate(g.geometry, g.value * h.value, generation);
    }
    case Space::SPD: {
      const Matrix s = spd_sqrt(g.value);
      Matrix r = s * h.value * s;
      return finish_translate(g.geometry, 0.5 * (r + r.transpose()), generation);
    }
    case Space::Translation:
      return finish_translate(g.geometry, g.value + h.value, generation);
    default:
      return finish_translate(g.geometry, g.value * h.value, generation);
  }
}

Point invert(const Point& g) {
  switch (g.geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel:
    case Space::Sphere:
      if (!g.is_mover()) {
        throw std::invalid_argument("invert: undefined for coset points; use movers");
      }
      return Point{g.geometry, g.value.transpose(), g.generation};
    case Space::SO:
      return Point{g.geometry, g.value.transpose(), g.generation};
    case Space::SPD: {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(g.value);
      Matrix inv = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                   eig.eigenvectors().transpose();
      return Point{g.geometry, 0.5 * (inv + inv.transpose()), g.generation};
    }
    case Space::Translation:
      return Point{g.geometry, -g.value, g.generation};
    default:
      return Point{g.geometry, g.value.inverse(), g.generation};
  }
}

// --- algebra bases ---

namespace {

std::vector<Matrix> skew_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(d * (d - 1) / 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      basis.push_back(inv_sqrt2 * (unit(d, d, i, j) - unit(d, d, j, i)));
  return basis;
}

std::vector<Matrix> sym_basis(int d) {
  std::vector<Matrix> basis;
  basis.reserve(d * (d + 1) / 2);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) basis.push_back(unit(d, d, i, i));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      basis.push_back(inv_sqrt2 * (unit(d, d, i, j) + unit(d, d, j, i)));
  return basis;
}

std::vector<Matrix> traceless_sym_basis(int d) {
  std::vector<Matrix> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      basis.push_back(inv_sqrt2 * (unit(d, d, i, j) + unit(d, d, j, i)));
  for (int l = 1; l < d; ++l) {
    Matrix m = Matrix::Zero(d, d);
    for (int i = 0; i < l; ++i) m(i, i) = 1.0;
    m(l, l) = -static_cast<double>(l);
    basis.push_back(m / std::sqrt(static_cast<double>(l) * (l + 1)));
  }
  return basis;
}

// Embeds matrices into the top-left (or prescribed) block of a larger zero matrix.
Matrix embed_block(int dim, int row, int col, const Matrix& block) {
  Matrix m = Matrix::Zero(dim, dim);
  m.block(row, col, block.rows(), block.cols()) = block;
  return m;
}

}  // namespace

AlgebraBasis algebra_basis(const KleinGeometry& geometry) {
  const int n = geometry.n();
  const int k = geometry.k();
  AlgebraBasis basis{geometry, {}, {}};
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (geometry.space()) {
    case Space::Grassmannian: {
      for (const Matrix& a : skew_basis(k)) basis.h_basis.push_back(embed_block(n, 0, 0, a));
      for (const Matrix& b : skew_basis(n - k)) basis.h_basis.push_back(embed_block(n, k, k, b));
      for (int a = 0; a < n - k; ++a)
        for (int b = 0; b < k; ++b) {
          Matrix m = Matrix::Zero(n, n);
          m(k + a, b) = inv_sqrt2;
          m(b, k + a) = -inv_sqrt2;
          basis.m_basis.push_back(std::move(m));
        }
      break;
    }
    case Space::Stiefel: {
      for (const Matrix& b : skew_basis(n - k)) basis.h_basis.push_back(embed_block(n, k, k, b));
      for (const Matrix& a : skew_basis(k)) basis.m_basis.push_back(embed_block(n, 0, 0, a));
      for (int a = 0; a < n - k; ++a)
        for (int b = 0; b < k; ++b) {
          Matrix m = Matrix::Zero(n, n);
          m(k + a, b) = inv_sqrt2;
          m(b, k + a) = -inv_sqrt2;
          basis.m_basis.push_back(std::move(m));
        }
      break;
    }
    case Space::Sphere: {
      for (const Matrix& b : skew_basis(n - 1)) basis.h_basis.push_back(embed_block(n, 1, 1, b));
      for (int j = 1; j < n; ++j) {
        Matrix m = Matrix::Zero(n, n);
        m(j, 0) = inv_sqrt2;
        m(0, j) = -inv_sqrt2;
        basis.m_basis.push_back(std::move(m));
      }
      break;
    }
    case Space::SO:
      basis.m_basis = skew_basis(n);
      break;
    case Space::SL: {
      basis.m_basis = skew_basis(n);
      for (Matrix& m : traceless_sym_basis(n)) basis.m_basis.push_back(std::move(m));
      break;
    }
    case Space::GLplus: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis.m_basis.push_back(unit(n, n, i, j));
      break;
    }
    case Space::SE: {
      for (const Matrix& a : skew_basis(n)) basis.m_basis.push_back(embed_block(n + 1, 0, 0, a));
      for (int i = 0; i < n; ++i) basis.m_basis.push_back(unit(n + 1, n + 1, i, n));
      break;
    }
    case Space::SPD: {
      basis.h_basis = skew_basis(n);
      basis.m_basis = sym_basis(n);
      break;
    }
    case Space::Unipotent: {
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) basis.m_basis.push_back(unit(n, n, i, j));
      break;
    }
    case Space::Translation: {
      for (int i = 0; i < n; ++i) basis.m_basis.push_back(unit(n + 1, n + 1, i, n));
      break;
    }
  }
  return basis;
}

std::vector<Matrix> tangent_basis(const Point& base) {
  const KleinGeometry& geometry = base.geometry;
  const int n = geometry.n();
  const int k = geometry.k();
  const Matrix& p = base.value;
  std::vector<Matrix> basis;
  switch (geometry.space()) {
    case Space::Grassmannian: {
      const Matrix perp = orthogonal_complement(p);
      for (int a = 0; a < n - k; ++a)
        for (int b = 0; b < k; ++b) basis.push_back(perp.col(a) * Matrix::Identity(k, k).row(b));
      break;
    }
    case Space::Stiefel: {
      // p(E_ij - E_ji) has unit norm in the canonical metric without the
      // 1/sqrt(2) normalization of the Frobenius one.
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) basis.push_back(p * (unit(k, k, i, j) - unit(k, k, j, i)));
      const Matrix perp = orthogonal_complement(p);
      for (int a = 0; a < n - k; ++a)
        for (int b = 0; b < k; ++b) basis.push_back(perp.col(a) * Matrix::Identity(k, k).row(b));
      break;
    }
    case Space::Sphere: {
      const Matrix perp = orthogonal_complement(p);
      for (int j = 0; j < n - 1; ++j) basis.push_back(perp.col(j));
      break;
    }
    case Space::SO:
      basis = skew_basis(n);
      break;
    case Space::SL: {
      basis = skew_basis(n);
      for (Matrix& m : traceless_sym_basis(n)) basis.push_back(std::move(m));
      break;
    }
    case Space::GLplus:
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) basis.push_back(unit(n, n, i, j));
      break;
    case Space::SE: {
      for (const Matrix& a : skew_basis(n)) basis.push_back(embed_block(n + 1, 0, 0, a));
      for (int i = 0; i < n; ++i) basis.push_back(unit(n + 1, n + 1, i, n));
      break;
    }
    case Space::SPD: {
      const Matrix s = spd_sqrt(p);
      for (const Matrix& m : sym_basis(n)) basis.push_back(s * m * s);
      break;
    }
    case Space::Unipotent:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) basis.push_back(unit(n, n, i, j));
      break;
    case Space::Translation:
      for (int i = 0; i < n; ++i) basis.push_back(unit(n, 1, i, 0));
      break;
  }
  return basis;
}

Point sl_sample(const Matrix& traceless_sym, const Matrix& skew) {
  if (traceless_sym.rows() != traceless_sym.cols() || skew.rows() != skew.cols() ||
      traceless_sym.rows() != skew.rows()) {
    throw std::invalid_argument("sl_sample: dimension mismatch");
  }
  const double scale = std::max(1.0, traceless_sym.norm());
  if (sym_residual(traceless_sym) > 1e-10 * scale || std::abs(traceless_sym.trace()) > 1e-10 * scale) {
    throw std::invalid_argument("sl_sample: mu must be traceless symmetric");
  }
  if (skew_residual(skew) > 1e-10 * std::max(1.0, skew.norm())) {
    throw std::invalid_argument("sl_sample: eta must be skew-symmetric");
  }
  const int n = static_cast<int>(skew.rows());
  Matrix g = matrix_exp(skew) * symmetric_exp(traceless_sym);
  return Point{KleinGeometry::special_linear(n), std::move(g), 0};
}

Point reproject(const Point& p) {
  const int n = p.geometry.n();
  Matrix v = p.value;
  if (p.is_mover()) {
    PolarFactors polar = polar_decompose(v);
    return Point{p.geometry, std::move(polar.q), p.generation};
  }
  switch (p.geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel:
      return Point{p.geometry, qr_thin(v).q, p.generation};
    case Space::SO: {
      PolarFactors polar = polar_decompose(v);
      return Point{p.geometry, std::move(polar.q), p.generation};
    }
    case Space::SL: {
      const double det = v.determinant();
      if (det <= 0.0) throw std::domain_error("reproject: determinant not positive");
      return Point{p.geometry, v / std::pow(det, 1.0 / n), p.generation};
    }
    case Space::SE: {
      PolarFactors polar = polar_decompose(v.topLeftCorner(n, n));
      Matrix fixed = Matrix::Zero(n + 1, n + 1);
      fixed.topLeftCorner(n, n) = polar.q;
      fixed.topRightCorner(n, 1) = v.topRightCorner(n, 1);
      fixed(n, n) = 1.0;
      return Point{p.geometry, std::move(fixed), p.generation};
    }
    case Space::SPD: {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (v + v.transpose()));
      const double floor = tolerances().spd_floor * std::max(1.0, eig.eigenvalues().maxCoeff());
      Vector lambda = eig.eigenvalues().cwiseMax(floor);
      Matrix fixed = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
      return Point{p.geometry, 0.5 * (fixed + fixed.transpose()), p.generation};
    }
    case Space::Unipotent: {
      Matrix fixed = Matrix(v.triangularView<Eigen::StrictlyUpper>());
      fixed += Matrix::Identity(n, n);
      return Point{p.geometry, std::move(fixed), p.generation};
    }
    case Space::Sphere:
      return Point{p.geometry, v / v.norm(), p.generation};
    default:
      return p;
  }
}

}  // namespace kleinopt
