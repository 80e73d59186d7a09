#include "kleinopt/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kleinopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Step sizes halve on failure; the floor keeps long all-failure tails (a
// converged run spending its remaining budget) from underflowing to zero.
constexpr double kStepFloor = 1e-300;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Budget-aware objective evaluator with extreme-barrier constraint handling:
// infeasible points and non-finite values evaluate to +inf and never accept.
class Evaluator {
 public:
  Evaluator(const Objective& objective, std::int64_t max_evals)
      : objective_(objective), max_evals_(max_evals) {
    if (!objective_.value) throw std::invalid_argument("objective has no value function");
  }

  bool exhausted() const { return evals_ >= max_evals_; }
  std::int64_t evals() const { return evals_; }
  bool nan_seen() const { return nan_seen_; }

  bool feasible(const Point& p) const {
    if (!objective_.constraints) return true;
    return (objective_.constraints(p).array() <= 0.0).all();
  }

  double eval(const Point& p) {
    ++evals_;
    if (!feasible(p)) return kInf;
    const double f = objective_.value(p);
    if (!std::isfinite(f)) {
      nan_seen_ = true;
      return kInf;
    }
    return f;
  }

 private:
  const Objective& objective_;
  std::int64_t max_evals_;
  std::int64_t evals_ = 0;
  bool nan_seen_ = false;
};

TangentVector combine(const Point& base, const Matrix& value) {
  return TangentVector{base.geometry, base, value};
}

// L_g(M) with the quotient convention: coset points are moved by their SO(n)
// movers from the left, group elements by the group law from the right.
Point compose_move(const Point& incumbent, const Point& element) {
  if (incumbent.geometry.is_quotient()) {
    return left_translate(element, incumbent);
  }
  return left_translate(incumbent, element);
}

void validate_common(const SolverConfig& cfg) {
  if (!(cfg.forcing_coefficient > 0.0) || !(cfg.forcing_exponent > 1.0)) {
    throw std::invalid_argument("forcing function needs c > 0 and q > 1");
  }
  if (cfg.max_evals <= 0) throw std::invalid_argument("max_evals must be positive");
  if (cfg.direction_count < 1) throw std::invalid_argument("direction_count must be >= 1");
}

}  // namespace

double forcing(double alpha, const SolverConfig& cfg) {
  if (alpha < 0.0) throw std::invalid_argument("forcing: alpha must be non-negative");
  return cfg.forcing_coefficient * std::pow(alpha, cfg.forcing_exponent);
}

// --- coordinate search strategy ---

CoordinateSearchStrategy::CoordinateSearchStrategy(double initial_step, double step_tolerance)
    : initial_step_(initial_step), step_tolerance_(step_tolerance) {
  if (!(initial_step > 0.0)) throw std::invalid_argument("initial step must be positive");
}

void CoordinateSearchStrategy::reset(int dim, double center_value) {
  center_ = Vector::Zero(dim);
  center_value_ = center_value;
  step_ = initial_step_;
}

std::vector<Vector> CoordinateSearchStrategy::propose() {
  std::vector<Vector> candidates;
  candidates.reserve(2 * static_cast<std::size_t>(center_.size()));
  for (Eigen::Index i = 0; i < center_.size(); ++i) {
    Vector plus = center_;
    plus[i] += step_;
    candidates.push_back(std::move(plus));
    Vector minus = center_;
    minus[i] -= step_;
    candidates.push_back(std::move(minus));
  }
  return candidates;
}

void CoordinateSearchStrategy::observe(const std::vector<Vector>& candidates,
                                       const std::vector<double>& values) {
  int best = -1;
  double best_value = center_value_;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < best_value) {
      best_value = values[i];
      best = static_cast<int>(i);
    }
  }
  if (best >= 0) {
    center_ = candidates[static_cast<std::size_t>(best)];
    center_value_ = best_value;
  } else {
    step_ *= 0.5;
  }
}

// --- Procedure 1: generic direct-search wrapper ---

SolveResult direct_search(const KleinGeometry& geometry, const Objective& objective,
                          PollStrategy& strategy, const SolverConfig& cfg,
                          const std::optional<Point>& initial) {
  validate_common(cfg);
  const double rho = geometry.injectivity_radius();
  double s_fix = cfg.s_fix;
  double s_max = cfg.s_max;
  if (geometry.exp_surjective()) {
    s_fix = kInf;
    s_max = kInf;
  } else {
    if (!(s_fix > 0.0) || !(s_fix < s_max) || !(s_max <= rho)) {
      throw std::invalid_argument("direct_search: need 0 < s_fix < s_max <= rho");
    }
  }

  const auto start = Clock::now();
  Evaluator evaluator(objective, cfg.max_evals);
  Point anchor = initial ? *initial : identity_point(geometry);
  if (!evaluator.feasible(anchor)) {
    throw std::invalid_argument("direct_search: infeasible initial point");
  }
  double f_anchor = evaluator.eval(anchor);

  const int dim = geometry.tangent_dim();
  std::vector<Matrix> basis = tangent_basis(anchor);
  strategy.reset(dim, f_anchor);

  auto offset_to_tangent = [&](const Vector& coords) {
    const auto [rows, cols] = geometry.point_shape();
    Matrix value = Matrix::Zero(rows, cols);
    for (int i = 0; i < dim; ++i) value += coords[i] * basis[static_cast<std::size_t>(i)];
    return combine(anchor, value);
  };

  SolveResult result{anchor, f_anchor, 0, {}};
  std::int64_t k = 0;
  while (!strategy.converged() && !evaluator.exhausted()) {
    ++k;
    std::vector<Vector> candidates = strategy.propose();
    bool clipped = false;
    for (Vector& mu : candidates) {
      const double norm = mu.norm();
      if (norm >= s_max) {
        mu *= (s_max * (1.0 - 1e-12)) / norm;
        clipped = true;
      }
    }
    std::vector<double> values(candidates.size(), kInf);
    for (std::size_t j = 0; j < candidates.size(); ++j) {
      if (evaluator.exhausted()) break;
      values[j] = evaluator.eval(exp_map(anchor, offset_to_tangent(candidates[j])));
    }
    strategy.observe(candidates, values);

    const Vector& mu_star = strategy.incumbent_offset();
    if (strategy.incumbent_value() < result.f_best) {
      result.f_best = strategy.incumbent_value();
      result.best = exp_map(anchor, offset_to_tangent(mu_star));
    }

    bool moved = false;
    if (mu_star.norm() > s_fix) {
      anchor = exp_map(anchor, offset_to_tangent(mu_star));
      f_anchor = strategy.incumbent_value();
      basis = tangent_basis(anchor);
      strategy.reset(dim, f_anchor);
      moved = true;
    }

    TraceRecord row;
    row.k = k;
    row.evals = evaluator.evals();
    row.f_best = result.f_best;
    row.step = strategy.step();
    row.moved = moved;
    row.ms = elapsed_ms(start);
    row.clipped = clipped;
    row.nan_flagged = evaluator.nan_seen();
    result.trace.push_back(row);
  }
  result.evals = evaluator.evals();
  return result;
}

// --- Procedure 2: probabilistic descent through the Lie algebra ---

SolveResult probabilistic_descent_algebra(const KleinGeometry& geometry,
                                          const Objective& objective, const SolverConfig& cfg,
                                          RandomSource& rng,
                                          const std::optional<Point>& initial) {
  validate_common(cfg);
  const double rho = geometry.injectivity_radius();
  if (!(cfg.s_fix > 0.0) || !(cfg.s_fix < cfg.s_max)) {
    throw std::invalid_argument("probabilistic_descent_algebra: need 0 < s_fix < s_max");
  }
  if (!(cfg.s_max < rho / 2.0)) {
    throw std::invalid_argument("probabilistic_descent_algebra: need s_max < rho/2");
  }
  if (!(cfg.initial_step > 0.0) || !(cfg.initial_step < cfg.s_max)) {
    throw std::invalid_argument("probabilistic_descent_algebra: need 0 < s_0 < s_max");
  }

  const auto start = Clock::now();
  Evaluator evaluator(objective, cfg.max_evals);
  Point anchor = initial ? *initial : identity_point(geometry);
  Point incumbent = anchor;
  double f_best = evaluator.eval(incumbent);
  const auto [rows, cols] = geometry.point_shape();
  Matrix w = Matrix::Zero(rows, cols);
  double s = cfg.initial_step;

  SolveResult result{incumbent, f_best, 0, {}};
  std::int64_t k = 0;
  while (!evaluator.exhausted()) {
    ++k;
    bool accepted = false;
    Matrix w_test = Matrix::Zero(rows, cols);
    double omega_norm = 0.0;
    double gap = 0.0;
    for (int d = 0; d < cfg.direction_count && !accepted; ++d) {
      const TangentVector omega = random_tangent(anchor, s, rng);
      omega_norm = tangent_norm(omega);
      gap = forcing(omega_norm, cfg);
      const double threshold = f_best - gap;

      const Matrix w_plus = w + omega.value;
      Point h_plus = exp_map(anchor, combine(anchor, w_plus));
      const double f_plus = evaluator.eval(h_plus);
      if (f_plus < threshold) {
        incumbent = std::move(h_plus);
        f_best = f_plus;
        w_test = w_plus;
        accepted = true;
        break;
      }
      if (evaluator.exhausted()) break;
      const Matrix w_minus = w - omega.value;
      Point h_minus = exp_map(anchor, combine(anchor, w_minus));
      const double f_minus = evaluator.eval(h_minus);
      if (f_minus < threshold) {
        incumbent = std::move(h_minus);
        f_best = f_minus;
        w_test = w_minus;
        accepted = true;
      }
    }

    s = accepted ? std::min(cfg.s_max, 2.0 * s) : std::max(kStepFloor, 0.5 * s);

    // w_test stays zero on failure, so the annulus test below cannot fire;
    // the offset itself persists (the poll stays centered on the incumbent,
    // which always sits at exp(anchor, w)).
    const double w_test_norm = accepted ? tangent_norm(combine(anchor, w_test)) : 0.0;
    bool moved = false;
    if (w_test_norm > cfg.s_fix) {
      anchor = incumbent;
      w = Matrix::Zero(rows, cols);
      moved = true;
    } else if (accepted) {
      w = w_test;
    }

    TraceRecord row;
    row.k = k;
    row.evals = evaluator.evals();
    row.f_best = f_best;
    row.step = s;
    row.moved = moved;
    row.ms = elapsed_ms(start);
    row.accepted = accepted;
    row.w_test_norm = w_test_norm;
    row.forcing_gap = gap;
    row.nan_flagged = evaluator.nan_seen();
    result.trace.push_back(row);
  }
  result.best = incumbent;
  result.f_best = f_best;
  result.evals = evaluator.evals();
  return result;
}

// --- Procedure 3: probabilistic descent working only with the group ---

SolveResult probabilistic_descent_group(const KleinGeometry& geometry,
                                        const Objective& objective, const GeneratorConfig& gen,
                                        const SolverConfig& cfg, RandomSource& rng,
                                        const std::optional<Point>& initial) {
  validate_common(cfg);
  if (!(gen.geometry == geometry)) {
    throw std::invalid_argument("probabilistic_descent_group: generator geometry mismatch");
  }
  const double cap = gen.radius_cap;
  if (!(cfg.initial_step > 0.0) || !(cfg.initial_step <= cap)) {
    throw std::invalid_argument("probabilistic_descent_group: need 0 < r_0 <= R");
  }

  const auto start = Clock::now();
  Evaluator evaluator(objective, cfg.max_evals);
  Point incumbent = initial ? *initial : identity_point(geometry);
  double f_best = evaluator.eval(incumbent);
  double r = cfg.initial_step;

  SolveResult result{incumbent, f_best, 0, {}};
  std::int64_t k = 0;
  while (!evaluator.exhausted()) {
    ++k;
    const GroupSample sample = random_group_element(gen, r, rng);
    bool accepted = false;
    double gap = forcing(sample.norm_to_identity, cfg);

    Point h_plus = compose_move(incumbent, sample.element);
    const double f_plus = evaluator.eval(h_plus);
    if (f_plus < f_best - gap) {
      incumbent = std::move(h_plus);
      f_best = f_plus;
      accepted = true;
    } else if (!evaluator.exhausted()) {
      gap = forcing(sample.inverse_norm_to_identity, cfg);
      Point h_minus = compose_move(incumbent, sample.inverse);
      const double f_minus = evaluator.eval(h_minus);
      if (f_minus < f_best - gap) {
        incumbent = std::move(h_minus);
        f_best = f_minus;
        accepted = true;
      }
    }

    r = accepted ? std::min(cap, 2.0 * r) : std::max(kStepFloor, 0.5 * r);

    TraceRecord row;
    row.k = k;
    row.evals = evaluator.evals();
    row.f_best = f_best;
    row.step = r;
    row.moved = accepted;
    row.ms = elapsed_ms(start);
    row.accepted = accepted;
    row.forcing_gap = gap;
    row.nan_flagged = evaluator.nan_seen();
    result.trace.push_back(row);
  }
  result.best = incumbent;
  result.f_best = f_best;
  result.evals = evaluator.evals();
  return result;
}

}  // namespace kleinopt
