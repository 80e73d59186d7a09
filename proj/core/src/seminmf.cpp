#include "kleinopt/seminmf.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/QR>

namespace kleinopt {

namespace {

// Great-circle helpers on the unit sphere; the fit loop itself never uses
// them, only the Karcher-mean setup does.
Vector sphere_log(const Vector& p, const Vector& q) {
  const double c = std::clamp(p.dot(q), -1.0, 1.0);
  Vector residual = q - c * p;
  const double nr = residual.norm();
  if (nr < 1e-14) {
    if (c > 0.0) return Vector::Zero(p.size());
    throw std::domain_error("karcher_mean: mean not unique (antipodal data)");
  }
  return (std::acos(c) / nr) * residual;
}

Vector sphere_exp(const Vector& p, const Vector& v) {
  const double theta = v.norm();
  if (theta < 1e-300) return p;
  const double sinc = theta < 1e-6 ? 1.0 - theta * theta / 6.0 : std::sin(theta) / theta;
  Vector q = std::cos(theta) * p + sinc * v;
  return q / q.norm();
}

Vector in_plane(const Vector& mean, const Vector& v, double theta) {
  return std::cos(theta) * mean + std::sin(theta) * v;
}

double angle_between(const Vector& a, const Vector& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

// Max pairwise arc distance without the unit-norm precondition check.
double spread_unchecked(const Matrix& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < w.cols(); ++i)
    for (Eigen::Index j = i + 1; j < w.cols(); ++j)
      s = std::max(s, angle_between(w.col(i), w.col(j)));
  return s;
}

Vector random_unit_orthogonal(const Vector& mean, const Vector* v, RandomSource& rng) {
  const Eigen::Index n = mean.size();
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vector u(n);
    for (Eigen::Index i = 0; i < n; ++i) u[i] = rng.normal();
    u -= mean.dot(u) * mean;
    if (v != nullptr) u -= v->dot(u) * (*v);
    const double nu = u.norm();
    if (nu > 1e-9) return u / nu;
  }
  throw std::runtime_error("failed to draw an orthogonal direction");
}

Matrix pseudo_inverse(const Matrix& h) {
  const ThinSvd svd = thin_svd(h);
  const double cutoff = 1e-10 * (svd.sigma.size() > 0 ? svd.sigma[0] : 0.0);
  Vector inv = svd.sigma;
  for (Eigen::Index i = 0; i < inv.size(); ++i) {
    inv[i] = svd.sigma[i] > cutoff && svd.sigma[i] > 0.0 ? 1.0 / svd.sigma[i] : 0.0;
  }
  return svd.v * inv.asDiagonal() * svd.u.transpose();
}

}  // namespace

DataMatrix DataMatrix::from(Matrix x) {
  if (x.rows() < 2) throw std::invalid_argument("DataMatrix: need at least two dimensions");
  if (x.cols() < 1) throw std::invalid_argument("DataMatrix: need at least one column");
  if (!x.allFinite()) throw std::invalid_argument("DataMatrix: non-finite entries");
  Matrix x_hat = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).norm();
    if (norm < 1e-12) {
      throw std::invalid_argument("DataMatrix: zero column " + std::to_string(j));
    }
    x_hat.col(j) /= norm;
  }
  return DataMatrix{std::move(x), std::move(x_hat)};
}

void SemiNmfConfig::validate() const {
  if (rank < 1) throw std::invalid_argument("SemiNmfConfig: rank must be >= 1");
  // eps = pi is admitted: the constraint is then inactive (S(W) <= pi always).
  if (!(spread_bound > 0.0) || !(spread_bound <= M_PI)) {
    throw std::invalid_argument("SemiNmfConfig: spread bound must lie in (0, pi]");
  }
  if (max_iterations < 1) throw std::invalid_argument("SemiNmfConfig: need iterations >= 1");
  if (!(alpha_max > 0.0)) throw std::invalid_argument("SemiNmfConfig: alpha_max must be positive");
  if (!(decrease > 0.0) || !(decrease < 1.0)) {
    throw std::invalid_argument("SemiNmfConfig: decrease factor must lie in (0, 1)");
  }
  if (!(increase > 1.0)) throw std::invalid_argument("SemiNmfConfig: increase factor must exceed 1");
  if (!(contraction > 0.0) || !(contraction < 1.0)) {
    throw std::invalid_argument("SemiNmfConfig: contraction factor must lie in (0, 1)");
  }
  if (!(forcing_coefficient > 0.0) || !(forcing_exponent > 1.0)) {
    throw std::invalid_argument("SemiNmfConfig: forcing needs c > 0, q > 1");
  }
}

std::string step_type_name(StepType type) {
  switch (type) {
    case StepType::SearchA: return "search_a";
    case StepType::SearchB: return "search_b";
    case StepType::PollPlus: return "poll_plus";
    case StepType::PollMinus: return "poll_minus";
    case StepType::Fail: return "fail";
  }
  return "unknown";
}

double spread(const Matrix& w) {
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if (std::abs(w.col(j).norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("spread: column " + std::to_string(j) + " is not unit-norm");
    }
  }
  return spread_unchecked(w);
}

Vector karcher_mean(const Matrix& unit_columns) {
  const Eigen::Index m = unit_columns.cols();
  if (m < 1) throw std::invalid_argument("karcher_mean: no columns");
  Vector mean = unit_columns.rowwise().sum();
  const double norm = mean.norm();
  if (norm < 1e-12) {
    throw std::domain_error("karcher_mean: mean not unique (spread-out data)");
  }
  mean /= norm;

  const double tol = std::min(1e-10, 0.5e-9 / static_cast<double>(m));
  for (int iter = 0; iter < 1000; ++iter) {
    Vector step = Vector::Zero(mean.size());
    for (Eigen::Index j = 0; j < m; ++j) step += sphere_log(mean, unit_columns.col(j));
    step /= static_cast<double>(m);
    if (step.norm() <= tol) return mean;
    mean = sphere_exp(mean, step);
  }
  throw std::runtime_error("karcher_mean: no convergence within the iteration cap");
}

NnlsResult nnls(const Matrix& x, const Matrix& w) {
  if (x.rows() != w.rows()) throw std::invalid_argument("nnls: dimension mismatch");
  const Eigen::Index k = w.cols();
  const Eigen::Index m = x.cols();
  NnlsResult result{Matrix::Zero(k, m), 0.0};

  const Matrix wtw = w.transpose() * w;
  const double dual_tol = 1e-11 * std::max(1.0, wtw.norm());

  for (Eigen::Index j = 0; j < m; ++j) {
    const Vector b = x.col(j);
    Vector h = Vector::Zero(k);
    std::vector<bool> passive(static_cast<std::size_t>(k), false);
    Eigen::Index passive_count = 0;

    const int outer_cap = 30 * static_cast<int>(k) + 30;
    for (int outer = 0; outer < outer_cap; ++outer) {
      const Vector dual = w.transpose() * (b - w * h);
      Eigen::Index enter = -1;
      double best = dual_tol;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (!passive[static_cast<std::size_t>(i)] && dual[i] > best) {
          best = dual[i];
          enter = i;
        }
      }
      if (enter < 0) break;
      passive[static_cast<std::size_t>(enter)] = true;
      ++passive_count;

      for (int inner = 0; inner < outer_cap; ++inner) {
        // Unconstrained least squares on the passive set.
        Matrix wp(w.rows(), passive_count);
        std::vector<Eigen::Index> cols;
        cols.reserve(static_cast<std::size_t>(passive_count));
        for (Eigen::Index i = 0; i < k; ++i) {
          if (passive[static_cast<std::size_t>(i)]) {
            wp.col(static_cast<Eigen::Index>(cols.size())) = w.col(i);
            cols.push_back(i);
          }
        }
        const Vector z = wp.colPivHouseholderQr().solve(b);

        double alpha = 1.0;
        bool interior = true;
        for (std::size_t idx = 0; idx < cols.size(); ++idx) {
          if (z[static_cast<Eigen::Index>(idx)] <= 0.0) {
            interior = false;
            const double hi = h[cols[idx]];
            const double zi = z[static_cast<Eigen::Index>(idx)];
            if (hi - zi > 0.0) alpha = std::min(alpha, hi / (hi - zi));
          }
        }
        if (interior) {
          h.setZero();
          for (std::size_t idx = 0; idx < cols.size(); ++idx) {
            h[cols[idx]] = z[static_cast<Eigen::Index>(idx)];
          }
          break;
        }
        // Backtrack to the boundary and drop the variables that hit zero.
        for (std::size_t idx = 0; idx < cols.size(); ++idx) {
          h[cols[idx]] += alpha * (z[static_cast<Eigen::Index>(idx)] - h[cols[idx]]);
        }
        for (std::size_t idx = 0; idx < cols.size(); ++idx) {
          if (h[cols[idx]] <= 1e-14) {
            h[cols[idx]] = 0.0;
            passive[static_cast<std::size_t>(cols[idx])] = false;
            --passive_count;
          }
        }
        if (passive_count == 0) break;
      }
    }
    result.h.col(j) = h;
    result.residual_sq += (b - w * h).squaredNorm();
  }
  return result;
}

FrameAtColumn make_frame(const Vector& mean, const Vector& w, RandomSource* rng) {
  const double c = std::clamp(mean.dot(w), -1.0, 1.0);
  Vector residual = w - c * mean;
  const double nr = residual.norm();
  if (nr < 1e-12) {
    throw std::domain_error("make_frame: column is parallel to the mean");
  }
  FrameAtColumn frame;
  frame.mean = mean;
  frame.v = residual / nr;
  frame.theta = std::acos(c);
  if (rng != nullptr && mean.size() >= 3) {
    frame.u = random_unit_orthogonal(mean, &frame.v, *rng);
  } else {
    frame.u = Vector::Zero(mean.size());
  }
  return frame;
}

Vector contract_column(const FrameAtColumn& frame, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("contract_column: delta must lie in (0, 1)");
  }
  if (!(frame.theta > 0.0) || !(frame.theta < M_PI / 2.0)) {
    throw std::domain_error("contract_column: theta out of (0, pi/2)");
  }
  return in_plane(frame.mean, frame.v, delta * frame.theta);
}

Vector dilate_column(const FrameAtColumn& frame, double gamma) {
  if (!(gamma > 1.0)) throw std::invalid_argument("dilate_column: gamma must exceed 1");
  if (!(frame.theta > 0.0)) throw std::domain_error("dilate_column: theta out of range");
  const double target = gamma * frame.theta;
  if (!(target < M_PI / 2.0)) {
    throw std::domain_error("dilate_column: dilated angle leaves (0, pi/2)");
  }
  return in_plane(frame.mean, frame.v, target);
}

Vector perturb_column(const FrameAtColumn& frame, double theta_hat, double phi, int sign) {
  if (!(theta_hat > 0.0) || !(theta_hat < M_PI / 2.0)) {
    throw std::invalid_argument("perturb_column: theta_hat out of (0, pi/2)");
  }
  if (phi < 0.0 || !(phi < M_PI / 2.0)) {
    throw std::invalid_argument("perturb_column: phi out of [0, pi/2)");
  }
  if (sign != 1 && sign != -1) throw std::invalid_argument("perturb_column: sign must be +-1");
  if (phi > 0.0 && frame.u.norm() < 0.5) {
    throw std::invalid_argument("perturb_column: frame has no out-of-plane direction");
  }
  return std::cos(phi) * in_plane(frame.mean, frame.v, theta_hat) +
         (sign > 0 ? 1.0 : -1.0) * std::sin(phi) * frame.u;
}

namespace {

struct Candidate {
  Matrix w;
  bool valid = false;
};

// Step 2a: unconstrained optimum X H^dagger, columns normalized, then
// contracted toward the mean until the spread constraint and the open angle
// interval hold.
Candidate search_a_candidate(const Matrix& x, const Matrix& h, const Vector& mean,
                             double spread_bound, double contraction) {
  Candidate cand;
  Matrix w = x * pseudo_inverse(h);
  const Eigen::Index k = w.cols();
  std::vector<Vector> dirs(static_cast<std::size_t>(k));
  std::vector<double> angles(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const double norm = w.col(j).norm();
    if (norm < 1e-12) return cand;
    w.col(j) /= norm;
    const double c = std::clamp(mean.dot(w.col(j)), -1.0, 1.0);
    Vector residual = w.col(j) - c * mean;
    const double nr = residual.norm();
    if (nr < 1e-12) return cand;  // parallel to the mean, angle pinned at a boundary
    dirs[static_cast<std::size_t>(j)] = residual / nr;
    angles[static_cast<std::size_t>(j)] = std::acos(c);
  }

  auto rebuild = [&]() {
    for (Eigen::Index j = 0; j < k; ++j) {
      w.col(j) = in_plane(mean, dirs[static_cast<std::size_t>(j)], angles[static_cast<std::size_t>(j)]);
    }
  };
  rebuild();

  auto feasible = [&]() {
    for (double theta : angles) {
      if (!(theta > 0.0) || !(theta < M_PI / 2.0)) return false;
    }
    return spread_unchecked(w) <= spread_bound;
  };

  int passes = 0;
  while (!feasible()) {
    if (++passes > 5000) return cand;
    for (double& theta : angles) theta *= contraction;
    rebuild();
  }
  cand.w = std::move(w);
  cand.valid = true;
  return cand;
}

}  // namespace

SemiNmfResult fit(const DataMatrix& data, const SemiNmfConfig& cfg, RandomSource& rng,
                  const SemiNmfObserver& observer) {
  cfg.validate();
  const Eigen::Index n = data.x.rows();
  const Eigen::Index m = data.x.cols();
  const int k = cfg.rank;
  if (k > m || k > n) {
    throw std::invalid_argument("fit: rank exceeds the data dimensions");
  }

  const Vector mean = karcher_mean(data.x_hat);

  // Initial W: small random cones around the Karcher mean, guaranteeing the
  // spread bound by the triangle inequality.
  double theta_hi = std::min(cfg.spread_bound / 2.0, M_PI / 4.0);
  double theta_lo = std::min(0.05, cfg.spread_bound / 4.0);
  if (theta_lo >= theta_hi) theta_lo = theta_hi / 2.0;
  Matrix w(n, k);
  for (int j = 0; j < k; ++j) {
    const Vector dir = random_unit_orthogonal(mean, nullptr, rng);
    w.col(j) = in_plane(mean, dir, rng.uniform(theta_lo, theta_hi));
  }

  NnlsResult solve = nnls(data.x, w);
  Matrix h = solve.h;
  double eps = solve.residual_sq;
  double alpha = cfg.alpha_max;

  SemiNmfResult result;
  result.karcher = mean;
  result.trace.reserve(static_cast<std::size_t>(cfg.max_iterations));
  if (observer) observer(0, w, h, eps);

  for (int i = 1; i <= cfg.max_iterations; ++i) {
    StepType type = StepType::Fail;
    const double gap = cfg.forcing_coefficient * std::pow(alpha, cfg.forcing_exponent);

    // Step 2a: optimal solution with contraction.
    {
      Candidate cand = search_a_candidate(data.x, h, mean, cfg.spread_bound, cfg.contraction);
      if (cand.valid) {
        NnlsResult trial = nnls(data.x, cand.w);
        if (eps - trial.residual_sq > gap) {
          w = std::move(cand.w);
          h = std::move(trial.h);
          eps = trial.residual_sq;
          alpha = std::min(cfg.alpha_max, cfg.increase * alpha);
          type = StepType::SearchA;
        }
      }
    }

    // Step 2b: random dilation.
    if (type == StepType::Fail) {
      std::vector<FrameAtColumn> frames;
      frames.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) frames.push_back(make_frame(mean, w.col(j), nullptr));
      std::vector<double> gammas(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) gammas[static_cast<std::size_t>(j)] = 1.0 + alpha * rng.uniform_open01();
      bool in_range = true;
      for (int j = 0; j < k; ++j) {
        // gamma can round down to exactly 1 once alpha reaches rounding
        // scale; such a dilation is a no-op and is skipped.
        if (!(gammas[static_cast<std::size_t>(j)] > 1.0) ||
            !(gammas[static_cast<std::size_t>(j)] * frames[static_cast<std::size_t>(j)].theta <
              M_PI / 2.0)) {
          in_range = false;
        }
      }
      if (in_range) {
        Matrix trial_w(n, k);
        for (int j = 0; j < k; ++j) {
          trial_w.col(j) = dilate_column(frames[static_cast<std::size_t>(j)],
                                         gammas[static_cast<std::size_t>(j)]);
        }
        if (spread_unchecked(trial_w) <= cfg.spread_bound) {
          NnlsResult trial = nnls(data.x, trial_w);
          if (eps - trial.residual_sq > gap) {
            w = std::move(trial_w);
            h = std::move(trial.h);
            eps = trial.residual_sq;
            alpha = std::min(cfg.alpha_max, cfg.increase * alpha);
            type = StepType::SearchB;
          }
        }
      }
    }

    // Step 3: poll by +/- perturbations with shared random angles.
    if (type == StepType::Fail) {
      std::vector<FrameAtColumn> frames;
      frames.reserve(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) frames.push_back(make_frame(mean, w.col(j), &rng));
      std::vector<double> theta_hat(static_cast<std::size_t>(k));
      std::vector<double> phi(static_cast<std::size_t>(k));
      for (int j = 0; j < k; ++j) {
        const double theta = frames[static_cast<std::size_t>(j)].theta;
        const double lo = std::max(1e-12, theta - alpha);
        const double hi = std::min(M_PI / 2.0 - 1e-12, theta + alpha);
        theta_hat[static_cast<std::size_t>(j)] = rng.uniform(lo, hi);
        phi[static_cast<std::size_t>(j)] = n >= 3 ? alpha * rng.uniform_open01() : 0.0;
        if (phi[static_cast<std::size_t>(j)] >= M_PI / 2.0) {
          phi[static_cast<std::size_t>(j)] = M_PI / 2.0 - 1e-12;
        }
      }

      for (int sign : {+1, -1}) {
        Matrix trial_w(n, k);
        bool in_range = true;
        for (int j = 0; j < k; ++j) {
          trial_w.col(j) = perturb_column(frames[static_cast<std::size_t>(j)],
                                          theta_hat[static_cast<std::size_t>(j)],
                                          phi[static_cast<std::size_t>(j)], sign);
          const double angle = angle_between(trial_w.col(j), mean);
          if (!(angle > 0.0) || !(angle < M_PI / 2.0)) in_range = false;
        }
        if (!in_range || spread_unchecked(trial_w) > cfg.spread_bound) continue;
        NnlsResult trial = nnls(data.x, trial_w);
        if (eps - trial.residual_sq > gap) {
          w = std::move(trial_w);
          h = std::move(trial.h);
          eps = trial.residual_sq;
          alpha = std::min(cfg.alpha_max, cfg.increase * alpha);
          type = sign > 0 ? StepType::PollPlus : StepType::PollMinus;
          break;
        }
      }
    }

    // Step 4: everything rejected, shrink the step.
    if (type == StepType::Fail) {
      alpha = cfg.decrease * alpha;
    }

    result.trace.push_back(SemiNmfTraceRow{i, eps, alpha, type});
    if (observer) observer(i, w, h, eps);
  }

  result.factorization = Factorization{w, h, eps, spread_unchecked(w)};
  return result;
}

SyntheticSemiNmf synthetic_seminmf(int n, int m, int k, double eps, RandomSource& rng) {
  if (n < 2 || m < 1 || k < 1 || k > n || k > m) {
    throw std::invalid_argument("synthetic_seminmf: bad dimensions");
  }
  if (!(eps > 0.0) || !(eps < M_PI)) {
    throw std::invalid_argument("synthetic_seminmf: eps must lie in (0, pi)");
  }
  Vector center(n);
  for (int i = 0; i < n; ++i) center[i] = rng.normal();
  center.normalize();

  // Columns within eps/4 of the center, so every pairwise angle is at most
  // eps/2 by the triangle inequality.
  const double max_angle = std::min(eps / 4.0, M_PI / 8.0);
  Matrix w_true(n, k);
  for (int j = 0; j < k; ++j) {
    const Vector dir = random_unit_orthogonal(center, nullptr, rng);
    const double theta = rng.uniform(0.2 * max_angle, max_angle);
    w_true.col(j) = in_plane(center, dir, theta);
  }
  Matrix h_true(k, m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) h_true(i, j) = rng.uniform(0.1, 1.0);
  return SyntheticSemiNmf{w_true * h_true, std::move(w_true), std::move(h_true)};
}

}  // namespace kleinopt
