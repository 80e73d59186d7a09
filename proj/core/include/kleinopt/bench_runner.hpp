#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kleinopt/solvers.hpp"

namespace kleinopt {

/// A benchmark problem: an objective together with the independently computed
/// optimum it is checked against.
struct BenchmarkProblem {
  Objective objective;
  double oracle = 0.0;  // NaN when no oracle is available (custom objectives)
  std::string description;
};

/// Builds a named objective for the geometry, with seeded problem data.
///   rayleigh     trace(p^T A p), A = diag(1..n) (or the custom matrix);
///                oracle = sum of the k smallest eigenvalues
///   procrustes   |A - QB|_F^2 on SO(n); oracle from the SVD closed form
///   nearest_spd  |S - T|_F^2 for a seeded SPD target; oracle 0
///   quadratic    |x - x*|^2 on Translation(n); oracle 0
///   custom       |p - M|_F^2 for a user matrix; no oracle
BenchmarkProblem make_problem(const KleinGeometry& geometry, const std::string& objective_name,
                              std::uint64_t data_seed,
                              const std::optional<Matrix>& custom = std::nullopt);

/// Solver defaults with radii valid for the geometry (s_max below rho/2,
/// radius cap at most rho).
SolverConfig default_solver_config(const KleinGeometry& geometry);

struct BenchmarkSpec {
  std::string geometry = "sphere";
  int n = 8;
  int k = 1;
  std::string objective = "rayleigh";
  std::string algorithm = "algebra";  // algebra | group | wrapper
  SolverConfig solver;
  int replicates = 1;
  std::optional<Matrix> custom_matrix;
};

struct RunResult {
  double f_best = 0.0;
  double oracle = 0.0;
  double gap = 0.0;
  std::int64_t evals = 0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  Point best;
  std::vector<TraceRecord> trace;
};

/// Runs the spec's algorithm once per replicate with derived seeds
/// (seed + replicate index) and seeded random starting points.
std::vector<RunResult> run_benchmark(const BenchmarkSpec& spec);

}  // namespace kleinopt
