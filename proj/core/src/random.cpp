#include "kleinopt/random.hpp"

#include <cmath>
#include <stdexcept>

namespace kleinopt {

GeneratorConfig::GeneratorConfig(KleinGeometry g, double cap) : geometry(g), radius_cap(cap) {
  if (!(radius_cap > 0.0)) {
    throw std::invalid_argument("GeneratorConfig: radius cap must be positive");
  }
  const double rho = geometry.injectivity_radius();
  if (std::isfinite(rho) && radius_cap > rho) {
    throw std::invalid_argument("GeneratorConfig: radius cap exceeds the injectivity radius");
  }
}

double solve_radius_bound(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("solve_radius_bound: r must be positive");
  double lo = 0.0;
  double hi = r;  // t e^t = r implies t < r
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

TangentVector random_tangent(const Point& base, double s, RandomSource& rng) {
  if (!(s > 0.0)) throw std::invalid_argument("random_tangent: s must be positive");
  const std::vector<Matrix> basis = tangent_basis(base);
  const std::size_t dim = basis.size();
  Vector coeff(dim);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) coeff[static_cast<Eigen::Index>(i)] = rng.normal();
    norm = coeff.norm();
  } while (norm < 1e-12);
  const double radius = s * rng.uniform_open01();
  const auto [rows, cols] = base.geometry.point_shape();
  Matrix value = Matrix::Zero(rows, cols);
  for (std::size_t i = 0; i < dim; ++i) {
    value += (radius * coeff[static_cast<Eigen::Index>(i)] / norm) * basis[i];
  }
  return TangentVector{base.geometry, base, std::move(value)};
}

namespace {

// Draws an algebra element with Frobenius norm strictly below bound, as an
// isotropic direction over the embedded m-basis.
Matrix random_algebra_element(const AlgebraBasis& basis, double bound, RandomSource& rng) {
  const std::size_t dim = basis.m_basis.size();
  Vector coeff(dim);
  double norm = 0.0;
  do {
    for (std::size_t i = 0; i < dim; ++i) coeff[static_cast<Eigen::Index>(i)] = rng.normal();
    norm = coeff.norm();
  } while (norm < 1e-12);
  const double radius = bound * rng.uniform_open01();
  Matrix omega = Matrix::Zero(basis.m_basis[0].rows(), basis.m_basis[0].cols());
  for (std::size_t i = 0; i < dim; ++i) {
    omega += (radius * coeff[static_cast<Eigen::Index>(i)] / norm) * basis.m_basis[i];
  }
  return omega;
}

}  // namespace

GroupSample random_group_element(const GeneratorConfig& cfg, double r, RandomSource& rng) {
  // r = R is admitted so the group solver's step rule r <- min(R, 2r) can
  // call the generator at its cap.
  if (!(r > 0.0) || r > cfg.radius_cap) {
    throw std::invalid_argument("random_group_element: need 0 < r <= R");
  }
  const KleinGeometry& geometry = cfg.geometry;
  const double bound = solve_radius_bound(r);
  static thread_local AlgebraBasis cached_basis{KleinGeometry::translation(1), {}, {}};
  if (!(cached_basis.geometry == geometry)) {
    cached_basis = algebra_basis(geometry);
  }
  const int n = geometry.n();

  for (int attempt = 0; attempt < 64; ++attempt) {
    const Matrix omega = random_algebra_element(cached_basis, bound, rng);
    Point element{geometry, Matrix(), 0};
    Point inverse{geometry, Matrix(), 0};
    Matrix identity;
    switch (geometry.space()) {
      case Space::Grassmannian:
      case Space::Stiefel:
      case Space::Sphere:
        // SO(n) movers acting on the coset representatives.
        element.value = matrix_exp(omega);
        inverse.value = element.value.transpose();
        identity = Matrix::Identity(n, n);
        break;
      case Space::Translation: {
        Matrix v(n, 1);
        for (int i = 0; i < n; ++i) v(i, 0) = omega(i, n);
        element.value = v;
        inverse.value = -v;
        identity = Matrix::Zero(n, 1);
        break;
      }
      case Space::Unipotent:
        element.value = nilpotent_exp(omega);
        inverse.value = nilpotent_exp(-omega);
        identity = Matrix::Identity(n, n);
        break;
      default:
        element.value = matrix_exp(omega);
        inverse.value = matrix_exp(-omega);
        identity = Matrix::Identity(element.value.rows(), element.value.cols());
        break;
    }
    const double norm_plus = (element.value - identity).norm();
    const double norm_minus = (inverse.value - identity).norm();
    // The construction guarantees both norms are below r; draws violating the
    // ball (or whose inverse does) are rejected and resampled.
    if (norm_plus < r && norm_minus < r) {
      return GroupSample{std::move(element), std::move(inverse), norm_plus, norm_minus};
    }
  }
  throw std::runtime_error("random_group_element: rejection sampling failed to terminate");
}

Point random_point(const KleinGeometry& geometry, RandomSource& rng) {
  const int n = geometry.n();
  const int k = geometry.k();
  auto gaussian = [&rng](int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
  };
  switch (geometry.space()) {
    case Space::Grassmannian:
    case Space::Stiefel:
      return Point{geometry, qr_thin(gaussian(n, k)).q, 0};
    case Space::SO: {
      PolarFactors polar = polar_decompose(gaussian(n, n) + 3.0 * Matrix::Identity(n, n));
      Matrix q = polar.q;
      if (q.determinant() < 0.0) q.col(0) = -q.col(0);
      return Point{geometry, std::move(q), 0};
    }
    case Space::SL: {
      const Matrix a = 0.3 * gaussian(n, n);
      Matrix sym = 0.5 * (a + a.transpose());
      sym -= (sym.trace() / n) * Matrix::Identity(n, n);
      const Matrix b = 0.3 * gaussian(n, n);
      const Matrix skew = 0.5 * (b - b.transpose());
      return sl_sample(sym, skew);
    }
    case Space::GLplus: {
      Matrix a = 0.4 * gaussian(n, n);
      return Point{geometry, matrix_exp(a), 0};
    }
    case Space::SE: {
      PolarFactors polar = polar_decompose(gaussian(n, n) + 3.0 * Matrix::Identity(n, n));
      Matrix q = polar.q;
      if (q.determinant() < 0.0) q.col(0) = -q.col(0);
      Matrix m = Matrix::Identity(n + 1, n + 1);
      m.topLeftCorner(n, n) = q;
      m.topRightCorner(n, 1) = gaussian(n, 1);
      return Point{geometry, std::move(m), 0};
    }
    case Space::SPD: {
      const Matrix a = 0.5 * gaussian(n, n);
      const Matrix sym = 0.5 * (a + a.transpose());
      return Point{geometry, matrix_exp(sym), 0};
    }
    case Space::Unipotent: {
      Matrix m = Matrix::Identity(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) m(i, j) = rng.normal();
      return Point{geometry, std::move(m), 0};
    }
    case Space::Translation:
      return Point{geometry, 2.0 * gaussian(n, 1), 0};
    case Space::Sphere: {
      Matrix v = gaussian(n, 1);
      while (v.norm() < 1e-9) v = gaussian(n, 1);
      return Point{geometry, v / v.norm(), 0};
    }
  }
  throw std::logic_error("random_point: unhandled geometry");
}

}  // namespace kleinopt
