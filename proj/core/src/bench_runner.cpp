#include "kleinopt/bench_runner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace kleinopt {

namespace {

bool geometry_matches(const std::string& objective, const KleinGeometry& geometry) {
  const Space s = geometry.space();
  if (objective == "rayleigh") {
    return s == Space::Grassmannian || s == Space::Stiefel || s == Space::Sphere;
  }
  if (objective == "procrustes") return s == Space::SO;
  if (objective == "nearest_spd") return s == Space::SPD;
  if (objective == "quadratic") return s == Space::Translation;
  if (objective == "custom") return true;
  return false;
}

Matrix seeded_uniform(int rows, int cols, RandomSource& rng, double lo, double hi) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

}  // namespace

BenchmarkProblem make_problem(const KleinGeometry& geometry, const std::string& objective_name,
                              std::uint64_t data_seed, const std::optional<Matrix>& custom) {
  if (!geometry_matches(objective_name, geometry)) {
    throw std::invalid_argument("objective '" + objective_name + "' is not defined on geometry '" +
                                geometry.name() + "'");
  }
  const int n = geometry.n();
  RandomSource rng(data_seed);
  BenchmarkProblem problem;

  if (objective_name == "rayleigh") {
    Matrix a;
    if (custom) {
      a = *custom;
      if (a.rows() != n || a.cols() != n) {
        throw std::invalid_argument("rayleigh: custom matrix must be n x n");
      }
      a = (0.5 * (a + a.transpose())).eval();
    } else {
      a = Vector::LinSpaced(n, 1.0, static_cast<double>(n)).asDiagonal();
    }
    const int k = geometry.space() == Space::Sphere ? 1 : geometry.k();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    problem.oracle = eig.eigenvalues().head(k).sum();
    problem.objective.value = [a](const Point& p) {
      return (p.value.transpose() * a * p.value).trace();
    };
    problem.description = "rayleigh trace quotient";
    return problem;
  }

  if (objective_name == "procrustes") {
    const Matrix b = seeded_uniform(n, n, rng, -1.0, 1.0);
    const Point q_true = random_point(geometry, rng);
    const Matrix a = q_true.value * b;
    // Closed-form optimum over SO(n) from the SVD of A B^T.
    const ThinSvd svd = thin_svd(a * b.transpose());
    const double det_uv = (svd.u * svd.v.transpose()).determinant();
    double best_trace = 0.0;
    for (int i = 0; i < n - 1; ++i) best_trace += svd.sigma[i];
    best_trace += svd.sigma[n - 1] * (det_uv > 0.0 ? 1.0 : -1.0);
    problem.oracle = a.squaredNorm() + b.squaredNorm() - 2.0 * best_trace;
    problem.objective.value = [a, b](const Point& p) { return (a - p.value * b).squaredNorm(); };
    problem.description = "orthogonal procrustes";
    return problem;
  }

  if (objective_name == "nearest_spd") {
    const Matrix a = 0.5 * seeded_uniform(n, n, rng, -1.0, 1.0);
    const Matrix sym = 0.5 * (a + a.transpose());
    const Matrix target = matrix_exp(sym);
    problem.oracle = 0.0;
    problem.objective.value = [target](const Point& p) { return (p.value - target).squaredNorm(); };
    problem.description = "nearest SPD matrix";
    return problem;
  }

  if (objective_name == "quadratic") {
    const Matrix target = seeded_uniform(n, 1, rng, -2.0, 2.0);
    problem.oracle = 0.0;
    problem.objective.value = [target](const Point& p) { return (p.value - target).squaredNorm(); };
    problem.description = "translated quadratic";
    return problem;
  }

  if (objective_name == "custom") {
    if (!custom) throw std::invalid_argument("custom objective requires a matrix file");
    const Matrix target = *custom;
    const auto [rows, cols] = geometry.point_shape();
    if (target.rows() != rows || target.cols() != cols) {
      throw std::invalid_argument("custom matrix shape does not match the geometry's points");
    }
    problem.oracle = std::numeric_limits<double>::quiet_NaN();
    problem.objective.value = [target](const Point& p) { return (p.value - target).squaredNorm(); };
    problem.description = "distance to a fixed matrix";
    return problem;
  }

  throw std::invalid_argument("unknown objective: " + objective_name);
}

SolverConfig default_solver_config(const KleinGeometry& geometry) {
  SolverConfig cfg;
  const double rho = geometry.injectivity_radius();
  const double cap = std::isfinite(rho) ? rho : 4.0;
  cfg.s_max = std::min(1.0, 0.49 * cap);
  cfg.s_fix = cfg.s_max / 4.0;
  cfg.initial_step = cfg.s_max / 2.0;
  cfg.radius_cap = std::min(1.0, cap);
  return cfg;
}

std::vector<RunResult> run_benchmark(const BenchmarkSpec& spec) {
  const KleinGeometry geometry = KleinGeometry::from_name(spec.geometry, spec.n, spec.k);
  if (spec.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  const BenchmarkProblem problem =
      make_problem(geometry, spec.objective, spec.solver.seed, spec.custom_matrix);

  std::vector<RunResult> results;
  results.reserve(static_cast<std::size_t>(spec.replicates));
  for (int rep = 0; rep < spec.replicates; ++rep) {
    SolverConfig cfg = spec.solver;
    cfg.seed = spec.solver.seed + static_cast<std::uint64_t>(rep);
    RandomSource rng(cfg.seed);
    const Point initial = random_point(geometry, rng);

    const auto start = std::chrono::steady_clock::now();
    SolveResult solved{initial, 0.0, 0, {}};
    if (spec.algorithm == "algebra") {
      solved = probabilistic_descent_algebra(geometry, problem.objective, cfg, rng, initial);
    } else if (spec.algorithm == "group") {
      GeneratorConfig gen(geometry, cfg.radius_cap);
      solved = probabilistic_descent_group(geometry, problem.objective, gen, cfg, rng, initial);
    } else if (spec.algorithm == "wrapper") {
      CoordinateSearchStrategy strategy(cfg.initial_step);
      solved = direct_search(geometry, problem.objective, strategy, cfg, initial);
    } else {
      throw std::invalid_argument("unknown algorithm: " + spec.algorithm);
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start)
                               .count();

    RunResult r{solved.f_best,
                problem.oracle,
                solved.f_best - problem.oracle,
                solved.evals,
                wall_ms,
                cfg.seed,
                solved.best,
                std::move(solved.trace)};
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace kleinopt
