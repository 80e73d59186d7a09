#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kleinopt/geometry.hpp"
#include "kleinopt/random.hpp"

namespace kleinopt {

/// Configuration shared by the three search procedures. The annulus radii
/// satisfy 0 < s_fix < s_max; the algebra descent procedure additionally
/// requires s_max < rho/2 and the generic wrapper s_max <= rho. radius_cap is
/// the R of the group-only procedure.
struct SolverConfig {
  double s_fix = 0.25;
  double s_max = 1.0;
  double radius_cap = 1.0;
  double initial_step = 0.5;  // s_0 (algebra/wrapper) or r_0 (group)
  double forcing_coefficient = 1e-3;
  double forcing_exponent = 2.0;
  std::int64_t max_evals = 20000;
  std::uint64_t seed = 0;
  // Random directions drawn per iteration of the algebra descent; the
  // procedure as written uses one.
  int direction_count = 1;
};

/// Sufficient-decrease forcing function: c * alpha^q.
double forcing(double alpha, const SolverConfig& cfg);

/// Black-box objective with optional inequality constraints (feasible iff
/// every component is <= 0). Infeasible or non-finite evaluations are treated
/// as +inf (extreme barrier).
struct Objective {
  std::function<double(const Point&)> value;
  std::function<Vector(const Point&)> constraints;  // may be empty
};

/// One per-iteration log row. The CSV export writes k, evals, f_best, step,
/// moved and ms; the remaining fields support replay checks in tests.
struct TraceRecord {
  std::int64_t k = 0;
  std::int64_t evals = 0;
  double f_best = 0.0;
  double step = 0.0;
  bool moved = false;
  double ms = 0.0;
  // diagnostics, not exported
  bool accepted = false;
  double w_test_norm = 0.0;
  double forcing_gap = 0.0;  // threshold used in the accept test
  bool clipped = false;
  bool nan_flagged = false;
};

struct SolveResult {
  Point best;
  double f_best = 0.0;
  std::int64_t evals = 0;
  std::vector<TraceRecord> trace;
};

/// Poll-step strategy plugged into the generic direct-search wrapper. The
/// strategy works in coordinates over a metric-orthonormal basis of m; the
/// wrapper owns the exponential map and the annulus bookkeeping.
class PollStrategy {
 public:
  virtual ~PollStrategy() = default;
  /// Starts a fresh mesh in a tangent space of the given dimension, centered
  /// at offset zero whose value is center_value.
  virtual void reset(int dim, double center_value) = 0;
  /// Candidate offsets for this round.
  virtual std::vector<Vector> propose() = 0;
  /// Values aligned with candidates (possibly clipped by the wrapper).
  virtual void observe(const std::vector<Vector>& candidates,
                       const std::vector<double>& values) = 0;
  virtual const Vector& incumbent_offset() const = 0;
  virtual double incumbent_value() const = 0;
  virtual bool converged() const = 0;
  virtual double step() const = 0;
};

/// Compass search over the coordinate directions with step halving on
/// unsuccessful rounds.
class CoordinateSearchStrategy final : public PollStrategy {
 public:
  explicit CoordinateSearchStrategy(double initial_step, double step_tolerance = 1e-9);

  void reset(int dim, double center_value) override;
  std::vector<Vector> propose() override;
  void observe(const std::vector<Vector>& candidates,
               const std::vector<double>& values) override;
  const Vector& incumbent_offset() const override { return center_; }
  double incumbent_value() const override { return center_value_; }
  bool converged() const override { return step_ < step_tolerance_; }
  double step() const override { return step_; }

 private:
  double initial_step_;
  double step_tolerance_;
  double step_ = 0.0;
  Vector center_;
  double center_value_ = 0.0;
};

/// Generic direct search on a reductive homogeneous space: candidates are
/// laid out by the strategy in the fixed tangent space at the anchor; the
/// anchor moves only when the incumbent offset leaves the s_fix ball.
SolveResult direct_search(const KleinGeometry& geometry, const Objective& objective,
                          PollStrategy& strategy, const SolverConfig& cfg,
                          const std::optional<Point>& initial = std::nullopt);

/// Probabilistic descent through the Lie algebra: polls +/- a random tangent
/// direction around the anchored offset, with sufficient decrease, step
/// doubling/halving, and the annulus rule for moving the anchor.
SolveResult probabilistic_descent_algebra(const KleinGeometry& geometry,
                                          const Objective& objective, const SolverConfig& cfg,
                                          RandomSource& rng,
                                          const std::optional<Point>& initial = std::nullopt);

/// Probabilistic descent working only with group elements: trial points are
/// L_g(M) and L_g(M^-1) for generated M, no tangent vector is ever formed.
SolveResult probabilistic_descent_group(const KleinGeometry& geometry,
                                        const Objective& objective, const GeneratorConfig& gen,
                                        const SolverConfig& cfg, RandomSource& rng,
                                        const std::optional<Point>& initial = std::nullopt);

}  // namespace kleinopt
