#include "kleinopt/verify.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "kleinopt/bench_runner.hpp"
#include "kleinopt/geometry.hpp"
#include "kleinopt/random.hpp"
#include "kleinopt/seminmf.hpp"
#include "kleinopt/solvers.hpp"

namespace kleinopt {

namespace {

void add(std::vector<CheckResult>& out, const std::string& name, double residual,
         double threshold, bool invert = false) {
  const bool pass = invert ? residual > threshold : residual <= threshold;
  out.push_back(CheckResult{name, residual, threshold, pass});
}

Matrix random_matrix(int rows, int cols, RandomSource& rng, double scale) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.uniform(-1.0, 1.0);
  return m;
}

// Truncated power series for e^A, the oracle the exponential kernel is
// checked against.
Matrix series_exp(const Matrix& a, int terms) {
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  for (int k = 1; k <= terms; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
  }
  return result;
}

std::vector<KleinGeometry> all_geometries() {
  return {KleinGeometry::grassmannian(4, 2), KleinGeometry::stiefel(4, 2),
          KleinGeometry::gl_plus(3),         KleinGeometry::special_linear(3),
          KleinGeometry::special_orthogonal(3), KleinGeometry::special_euclidean(3),
          KleinGeometry::spd(3),             KleinGeometry::unipotent(3),
          KleinGeometry::translation(3),     KleinGeometry::sphere(4)};
}

double span_residual(const Matrix& x, const std::vector<Matrix>& basis) {
  Matrix projection = Matrix::Zero(x.rows(), x.cols());
  for (const Matrix& b : basis) {
    const double coeff = (x.array() * b.array()).sum() / (b.array() * b.array()).sum();
    projection += coeff * b;
  }
  return (x - projection).norm();
}

std::vector<CheckResult> verify_kernels() {
  std::vector<CheckResult> out;
  RandomSource rng(17);

  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(4, 4, rng, 1.0);
    a *= 1.0 / std::max(1.0, a.norm());
    const Matrix oracle = series_exp(a, 30);
    worst = std::max(worst, (matrix_exp(a) - oracle).norm() / oracle.norm());
  }
  add(out, "exp matches 30-term series (norm <= 1)", worst, 1e-12);

  worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix a = random_matrix(4, 4, rng, 1.0);
    a *= 5.0 / std::max(5.0, a.norm());
    Matrix oracle = series_exp(a / 4.0, 30);
    oracle = oracle * oracle;
    oracle = oracle * oracle;
    worst = std::max(worst, (matrix_exp(a) - oracle).norm() / oracle.norm());
  }
  add(out, "exp matches scaled series (norm <= 5)", worst, 1e-12);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, rng, 0.5);
    const Matrix b = 0.3 * a + 0.2 * a * a;  // commutes with a
    worst = std::max(worst,
                     (matrix_exp(a + b) - matrix_exp(a) * matrix_exp(b)).norm());
  }
  add(out, "exp(a+b) = exp(a) exp(b) for commuting pairs", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, rng, 0.4);
    worst = std::max(worst, (matrix_log(matrix_exp(a)) - a).norm());
  }
  add(out, "log(exp(a)) = a", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix g = matrix_exp(random_matrix(4, 4, rng, 0.5));
    worst = std::max(worst, (matrix_exp(matrix_log(g)) - g).norm() / g.norm());
  }
  add(out, "exp(log(g)) = g", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(5, 3, rng, 1.0);
    const ThinSvd svd = thin_svd(a);
    worst = std::max(worst, (svd.u * svd.sigma.asDiagonal() * svd.v.transpose() - a).norm());
    const ThinQr qr = qr_thin(a);
    worst = std::max(worst, (qr.q * qr.r - a).norm());
  }
  add(out, "svd/qr multiply-back residual", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(4, 4, rng, 1.0);
    a += 4.0 * Matrix::Identity(4, 4);  // keep it invertible
    const PolarFactors polar = polar_decompose(a);
    worst = std::max(worst, (polar.q * polar.s - a).norm());
    worst = std::max(worst,
                     (polar.q.transpose() * polar.q - Matrix::Identity(4, 4)).norm());
  }
  add(out, "polar multiply-back residual", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(4, 4, rng, 1.0);
    const Matrix s = a * a.transpose() + Matrix::Identity(4, 4);
    const Matrix r = spd_sqrt(s);
    worst = std::max(worst, (r * r - s).norm());
  }
  add(out, "spd sqrt multiply-back residual", worst, 1e-10);

  worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix nil = Matrix::Zero(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j) nil(i, j) = rng.uniform(-1.0, 1.0);
    worst = std::max(worst, (matrix_exp(nil) - nilpotent_exp(nil)).norm());
  }
  add(out, "exp of nilpotent equals the finite sum", worst, 1e-12);

  return out;
}

std::vector<CheckResult> verify_manifolds() {
  std::vector<CheckResult> out;
  RandomSource rng(23);

  for (const KleinGeometry& geometry : all_geometries()) {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const Point base = random_point(geometry, rng);
      const TangentVector w = random_tangent(base, 1.0, rng);
      worst = std::max(worst, check_membership(exp_map(base, w)));
    }
    add(out, "exp_map membership on " + geometry.name(), worst, 1e-8);
  }

  for (const KleinGeometry& geometry : all_geometries()) {
    const AlgebraBasis basis = algebra_basis(geometry);
    double worst = 0.0;
    for (const Matrix& h1 : basis.h_basis) {
      for (const Matrix& h2 : basis.h_basis) {
        worst = std::max(worst, span_residual(lie_bracket(h1, h2), basis.h_basis));
      }
      for (const Matrix& m : basis.m_basis) {
        worst = std::max(worst, span_residual(lie_bracket(h1, m), basis.m_basis));
      }
    }
    add(out, "reductive brackets on " + geometry.name(), worst, 1e-10);
  }

  // Symmetric spaces: [m, m] lands back in h.
  {
    const std::vector<KleinGeometry> symmetric = {
        KleinGeometry::grassmannian(4, 2), KleinGeometry::spd(3),
        KleinGeometry::translation(3), KleinGeometry::sphere(4)};
    for (const KleinGeometry& geometry : symmetric) {
      const AlgebraBasis basis = algebra_basis(geometry);
      double worst = 0.0;
      for (const Matrix& m1 : basis.m_basis)
        for (const Matrix& m2 : basis.m_basis)
          worst = std::max(worst, span_residual(lie_bracket(m1, m2), basis.h_basis));
      add(out, "[m,m] in h on " + geometry.name(), worst, 1e-10);
    }
    // The SL(n)/SO(n) polar split is symmetric as well.
    const int n = 3;
    std::vector<Matrix> h;
    std::vector<Matrix> m;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Matrix s = Matrix::Zero(n, n);
        s(i, j) = 1.0;
        s(j, i) = -1.0;
        h.push_back(s);
        Matrix t = Matrix::Zero(n, n);
        t(i, j) = 1.0;
        t(j, i) = 1.0;
        m.push_back(t);
      }
    for (int l = 1; l < n; ++l) {
      Matrix d = Matrix::Zero(n, n);
      for (int i = 0; i < l; ++i) d(i, i) = 1.0;
      d(l, l) = -static_cast<double>(l);
      m.push_back(d);
    }
    double worst = 0.0;
    for (const Matrix& m1 : m)
      for (const Matrix& m2 : m) worst = std::max(worst, span_residual(lie_bracket(m1, m2), h));
    add(out, "[m,m] in h for the sl polar split", worst, 1e-10);
  }

  // Stiefel is reductive but not symmetric: some [m, m] escapes h.
  {
    const AlgebraBasis basis = algebra_basis(KleinGeometry::stiefel(4, 2));
    double witness = 0.0;
    for (const Matrix& m1 : basis.m_basis)
      for (const Matrix& m2 : basis.m_basis)
        witness = std::max(witness, span_residual(lie_bracket(m1, m2), basis.h_basis));
    add(out, "stiefel [m,m] escapes h (witness)", witness, 1e-3, /*invert=*/true);
  }

  // log inverts exp within the safe radius.
  for (const KleinGeometry& geometry : all_geometries()) {
    if (geometry.space() == Space::Stiefel) continue;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const Point base = random_point(geometry, rng);
      const double rho = geometry.injectivity_radius();
      const double s = std::isfinite(rho) ? 0.4 * rho : 1.0;
      const TangentVector w = random_tangent(base, s, rng);
      const Point q = exp_map(base, w);
      const TangentVector back = log_map(base, q);
      worst = std::max(worst, (back.value - w.value).norm());
    }
    add(out, "log inverts exp on " + geometry.name(), worst, 1e-8);
  }

  // One-parameter subgroup identity at the group level.
  {
    const std::vector<KleinGeometry> groups = {
        KleinGeometry::gl_plus(3),      KleinGeometry::special_linear(3),
        KleinGeometry::special_orthogonal(3), KleinGeometry::special_euclidean(3),
        KleinGeometry::unipotent(3),    KleinGeometry::translation(3)};
    double worst = 0.0;
    for (const KleinGeometry& geometry : groups) {
      for (int trial = 0; trial < 20; ++trial) {
        const Point base = random_point(geometry, rng);
        const TangentVector w = random_tangent(base, 0.4, rng);
        const double s = rng.uniform(0.1, 0.9);
        const TangentVector ws{geometry, base, s * w.value};
        const Point mid = exp_map(base, ws);
        const TangentVector wt{geometry, mid, (1.0 - s) * w.value};
        const Point two_step = exp_map(mid, wt);
        const Point direct = exp_map(base, w);
        worst = std::max(worst, (two_step.value - direct.value).norm());
      }
    }
    // SPD composes through its own multiplication law.
    const KleinGeometry geometry = KleinGeometry::spd(3);
    const Point e = identity_point(geometry);
    for (int trial = 0; trial < 20; ++trial) {
      const TangentVector w = random_tangent(e, 0.8, rng);
      const double s = rng.uniform(0.1, 0.9);
      const Point a = exp_map(e, TangentVector{geometry, e, s * w.value});
      const Point b = exp_map(e, TangentVector{geometry, e, (1.0 - s) * w.value});
      const Point direct = exp_map(e, w);
      worst = std::max(worst, (left_translate(a, b).value - direct.value).norm());
    }
    add(out, "one-parameter subgroup identity", worst, 1e-8);
  }

  // The bound |exp(w) - e| <= |w| e^|w| over random algebra draws.
  {
    double worst = -1.0;  // most negative slack means largest violation
    for (const KleinGeometry& geometry : all_geometries()) {
      const AlgebraBasis basis = algebra_basis(geometry);
      const Eigen::Index dim = static_cast<Eigen::Index>(basis.m_basis.size());
      for (int trial = 0; trial < 500; ++trial) {
        Matrix omega = Matrix::Zero(basis.m_basis[0].rows(), basis.m_basis[0].cols());
        for (Eigen::Index i = 0; i < dim; ++i) {
          omega += rng.uniform(-1.0, 1.0) * basis.m_basis[static_cast<std::size_t>(i)];
        }
        const double norm = omega.norm();
        const Matrix e = Matrix::Identity(omega.rows(), omega.cols());
        const double lhs = (matrix_exp(omega) - e).norm();
        worst = std::max(worst, lhs - norm * std::exp(norm));
      }
    }
    add(out, "group-ball bound |exp(w)-e| <= |w| e^|w|", worst, 1e-12);
  }

  return out;
}

std::vector<CheckResult> verify_generators() {
  std::vector<CheckResult> out;

  for (double r : {0.01, 0.1, 0.5}) {
    double worst = -1.0;
    for (const KleinGeometry& geometry : all_geometries()) {
      const double cap = std::min(1.0, geometry.injectivity_radius());
      if (r > cap) continue;
      RandomSource rng(101);
      GeneratorConfig cfg(geometry, cap);
      for (int trial = 0; trial < 2000; ++trial) {
        const GroupSample sample = random_group_element(cfg, r, rng);
        worst = std::max(worst, sample.norm_to_identity - r);
        worst = std::max(worst, sample.inverse_norm_to_identity - r);
      }
    }
    out.push_back(CheckResult{"norm guarantee at r = " + std::to_string(r), worst, 0.0,
                              worst < 0.0});
  }

  {
    const KleinGeometry geometry = KleinGeometry::special_orthogonal(3);
    GeneratorConfig cfg(geometry, 2.0);
    RandomSource a(7);
    RandomSource b(7);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const GroupSample sa = random_group_element(cfg, 0.5, a);
      const GroupSample sb = random_group_element(cfg, 0.5, b);
      worst = std::max(worst, (sa.element.value - sb.element.value).cwiseAbs().maxCoeff());
    }
    add(out, "same seed gives bitwise-identical draws", worst, 0.0);
  }

  {
    // Axis coverage on SO(3): no empty 30-degree cap after many draws.
    const KleinGeometry geometry = KleinGeometry::special_orthogonal(3);
    GeneratorConfig cfg(geometry, 2.0);
    RandomSource rng(11);
    std::vector<Vector> axes;
    for (int trial = 0; trial < 10000; ++trial) {
      const GroupSample sample = random_group_element(cfg, 1.0, rng);
      const Matrix w = matrix_log(sample.element.value);
      Vector axis(3);
      axis << w(2, 1), w(0, 2), w(1, 0);
      if (axis.norm() > 1e-12) axes.push_back(axis.normalized());
    }
    RandomSource grid_rng(13);
    double max_gap = 0.0;
    for (int g = 0; g < 400; ++g) {
      Vector d(3);
      for (int i = 0; i < 3; ++i) d[i] = grid_rng.normal();
      d.normalize();
      double best = M_PI;
      for (const Vector& axis : axes) {
        best = std::min(best, std::acos(std::clamp(std::abs(axis.dot(d)), 0.0, 1.0)));
        if (best == 0.0) break;
      }
      max_gap = std::max(max_gap, best);
    }
    add(out, "so(3) axis coverage, max 30-degree cap gap", max_gap, M_PI / 6.0);
  }

  return out;
}

std::vector<CheckResult> verify_solvers() {
  std::vector<CheckResult> out;
  const KleinGeometry geometry = KleinGeometry::sphere(6);
  BenchmarkProblem problem = make_problem(geometry, "rayleigh", 3);

  double membership_worst = 0.0;
  Objective wrapped;
  wrapped.value = [&](const Point& p) {
    membership_worst = std::max(membership_worst, check_membership(p));
    return problem.objective.value(p);
  };

  SolverConfig cfg = default_solver_config(geometry);
  cfg.max_evals = 4000;
  cfg.seed = 5;
  RandomSource rng(cfg.seed);
  const Point start = random_point(geometry, rng);
  const SolveResult run = probabilistic_descent_algebra(geometry, wrapped, cfg, rng, start);

  double monotone = 0.0;
  double annulus = 0.0;
  for (std::size_t i = 0; i < run.trace.size(); ++i) {
    if (i > 0) monotone = std::max(monotone, run.trace[i].f_best - run.trace[i - 1].f_best);
    const bool should_move = run.trace[i].w_test_norm > cfg.s_fix;
    if (should_move != run.trace[i].moved) annulus += 1.0;
  }
  add(out, "algebra descent trace is monotone", monotone, 0.0);
  add(out, "anchor moves exactly on annulus exits", annulus, 0.0);
  add(out, "all evaluated points stay on the manifold", membership_worst, 1e-6);
  add(out, "algebra descent reaches the rayleigh optimum", run.f_best - problem.oracle, 1e-3);

  {
    RandomSource rng_a(9);
    RandomSource rng_b(9);
    const Point init_a = random_point(geometry, rng_a);
    const Point init_b = random_point(geometry, rng_b);
    SolverConfig quick = cfg;
    quick.max_evals = 1500;
    const SolveResult ra =
        probabilistic_descent_algebra(geometry, problem.objective, quick, rng_a, init_a);
    const SolveResult rb =
        probabilistic_descent_algebra(geometry, problem.objective, quick, rng_b, init_b);
    double worst = std::abs(ra.f_best - rb.f_best);
    for (std::size_t i = 0; i < std::min(ra.trace.size(), rb.trace.size()); ++i) {
      worst = std::max(worst, std::abs(ra.trace[i].f_best - rb.trace[i].f_best));
    }
    add(out, "same seed gives identical traces", worst, 0.0);
  }

  {
    Objective constant;
    constant.value = [](const Point&) { return 1.0; };
    SolverConfig quick = cfg;
    quick.max_evals = 200;
    RandomSource r2(3);
    const Point start2 = identity_point(geometry);
    const SolveResult run2 =
        probabilistic_descent_algebra(geometry, constant, quick, r2, start2);
    const double moved = (run2.best.value - start2.value).norm();
    add(out, "constant objective never moves the incumbent", moved, 0.0);
  }

  {
    reset_log_map_call_count();
    GeneratorConfig gen(geometry, 1.0);
    SolverConfig quick = cfg;
    quick.max_evals = 2000;
    RandomSource r3(21);
    const Point start3 = random_point(geometry, r3);
    const SolveResult run3 =
        probabilistic_descent_group(geometry, problem.objective, gen, quick, r3, start3);
    add(out, "group descent never calls log_map",
        static_cast<double>(log_map_call_count()), 0.0);
    add(out, "group descent reaches the rayleigh optimum", run3.f_best - problem.oracle, 1e-3);
  }

  {
    SolverConfig dummy;
    double worst = std::abs(forcing(0.0, dummy) - 0.0);
    worst = std::max(worst, std::abs(forcing(1.0, dummy) - 1e-3));
    worst = std::max(worst, std::abs(forcing(0.5, dummy) - 2.5e-4));
    add(out, "forcing function values", worst, 1e-18);
  }

  return out;
}

std::vector<CheckResult> verify_seminmf() {
  std::vector<CheckResult> out;
  RandomSource rng(31);

  {
    Matrix w(4, 4);
    for (int j = 0; j < 4; ++j) {
      Vector v(4);
      for (int i = 0; i < 4; ++i) v[i] = rng.normal();
      w.col(j) = v.normalized();
    }
    double brute = 0.0;
    const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& pr : pairs) {
      brute = std::max(brute, std::acos(std::clamp(w.col(pr[0]).dot(w.col(pr[1])), -1.0, 1.0)));
    }
    add(out, "spread equals the pairwise maximum", std::abs(spread(w) - brute), 1e-14);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix w = random_matrix(4, 2, rng, 1.0);
      const Matrix x = random_matrix(4, 3, rng, 1.0);
      const NnlsResult res = nnls(x, w);
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Vector grad = w.transpose() * (w * res.h.col(j) - x.col(j));
        for (Eigen::Index i = 0; i < grad.size(); ++i) {
          if (res.h(i, j) > 1e-10) {
            worst = std::max(worst, std::abs(grad[i]));
          } else {
            worst = std::max(worst, std::max(0.0, -grad[i]));
          }
        }
      }
    }
    add(out, "nnls satisfies the KKT conditions", worst, 1e-8);
  }

  {
    Vector mean(5);
    for (int i = 0; i < 5; ++i) mean[i] = rng.normal();
    mean.normalize();
    Vector dir(5);
    for (int i = 0; i < 5; ++i) dir[i] = rng.normal();
    dir -= mean.dot(dir) * mean;
    dir.normalize();
    const double theta = 0.7;
    const Vector w = std::cos(theta) * mean + std::sin(theta) * dir;
    FrameAtColumn frame = make_frame(mean, w, nullptr);
    const double gamma = 1.4;
    const Vector dilated = dilate_column(frame, gamma);
    FrameAtColumn frame2 = make_frame(mean, dilated, nullptr);
    const Vector back = contract_column(frame2, 1.0 / gamma);
    add(out, "dilation then inverse contraction restores the column",
        (back - w).norm(), 1e-12);
  }

  {
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      Vector mean(6);
      for (int i = 0; i < 6; ++i) mean[i] = rng.normal();
      mean.normalize();
      Vector dir(6);
      for (int i = 0; i < 6; ++i) dir[i] = rng.normal();
      dir -= mean.dot(dir) * mean;
      dir.normalize();
      const double theta = rng.uniform(0.05, 1.4);
      FrameAtColumn frame = make_frame(mean, std::cos(theta) * mean + std::sin(theta) * dir, &rng);
      const Vector p = perturb_column(frame, rng.uniform(0.05, 1.4), rng.uniform(0.0, 1.4),
                                      trial % 2 == 0 ? 1 : -1);
      worst = std::max(worst, std::abs(p.norm() - 1.0));
    }
    add(out, "perturbations stay on the sphere", worst, 1e-12);
  }

  {
    Matrix cols(5, 12);
    Vector center(5);
    for (int i = 0; i < 5; ++i) center[i] = rng.normal();
    center.normalize();
    for (int j = 0; j < 12; ++j) {
      Vector d(5);
      for (int i = 0; i < 5; ++i) d[i] = rng.normal();
      d -= center.dot(d) * center;
      d.normalize();
      const double theta = rng.uniform(0.0, 0.8);
      cols.col(j) = std::cos(theta) * center + std::sin(theta) * d;
    }
    const Vector mean = karcher_mean(cols);
    Vector sum = Vector::Zero(5);
    for (int j = 0; j < 12; ++j) {
      const double c = std::clamp(mean.dot(cols.col(j)), -1.0, 1.0);
      Vector residual = cols.col(j) - c * mean;
      if (residual.norm() > 1e-14) sum += std::acos(c) / residual.norm() * residual;
    }
    add(out, "karcher mean is stationary", sum.norm(), 1e-9);
  }

  {
    // Small synthetic fit: invariants along the whole trace.
    const int n = 8;
    const int m = 30;
    const int k = 2;
    RandomSource gen(41);
    Vector center(n);
    for (int i = 0; i < n; ++i) center[i] = gen.normal();
    center.normalize();
    Matrix w_true(n, k);
    for (int j = 0; j < k; ++j) {
      Vector d(n);
      for (int i = 0; i < n; ++i) d[i] = gen.normal();
      d -= center.dot(d) * center;
      d.normalize();
      const double theta = gen.uniform(0.05, M_PI / 16.0);
      w_true.col(j) = std::cos(theta) * center + std::sin(theta) * d;
    }
    Matrix h_true(k, m);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < m; ++j) h_true(i, j) = gen.uniform(0.1, 1.0);
    const DataMatrix data = DataMatrix::from(w_true * h_true);

    SemiNmfConfig cfg;
    cfg.rank = k;
    cfg.spread_bound = M_PI / 4.0;
    cfg.max_iterations = 120;
    cfg.seed = 4;
    RandomSource fit_rng(cfg.seed);
    const SemiNmfResult result = fit(data, cfg, fit_rng);

    double monotone = 0.0;
    for (std::size_t i = 1; i < result.trace.size(); ++i) {
      monotone = std::max(monotone, result.trace[i].eps - result.trace[i - 1].eps);
    }
    add(out, "fit error sequence is non-increasing", monotone, 0.0);
    add(out, "final spread within the bound",
        result.factorization.spread - cfg.spread_bound, 0.0);
    double unit_worst = 0.0;
    for (int j = 0; j < k; ++j) {
      unit_worst = std::max(unit_worst, std::abs(result.factorization.w.col(j).norm() - 1.0));
    }
    add(out, "final columns are unit norm", unit_worst, 1e-10);
    add(out, "final H is non-negative", std::max(0.0, -result.factorization.h.minCoeff()), 0.0);
    const double rel =
        std::sqrt(result.factorization.fit_error) / data.x.norm();
    add(out, "synthetic relative fit error", rel, 0.05);
  }

  return out;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
  for (const CheckResult& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::vector<CheckResult> verify_suite(const std::string& suite) {
  if (suite == "kernels") return verify_kernels();
  if (suite == "manifolds") return verify_manifolds();
  if (suite == "generators") return verify_generators();
  if (suite == "solvers") return verify_solvers();
  if (suite == "seminmf") return verify_seminmf();
  if (suite == "all") {
    std::vector<CheckResult> out;
    for (const char* name : {"kernels", "manifolds", "generators", "solvers", "seminmf"}) {
      std::vector<CheckResult> part = verify_suite(name);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw std::invalid_argument("unknown verify suite: " + suite);
}

}  // namespace kleinopt
