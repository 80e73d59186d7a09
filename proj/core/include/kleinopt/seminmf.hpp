#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kleinopt/numkernel.hpp"
#include "kleinopt/random.hpp"

namespace kleinopt {

/// Input data for the constrained semi-NMF: the raw matrix and its
/// column-normalized copy.
struct DataMatrix {
  Matrix x;      // n x m, m data points in R^n
  Matrix x_hat;  // column-normalized copy

  static DataMatrix from(Matrix x);
};

/// A factorization X ~= W H with unit-norm columns of W and non-negative H.
struct Factorization {
  Matrix w;
  Matrix h;
  double fit_error = 0.0;  // |X - WH|_F^2
  double spread = 0.0;     // S(W)
};

struct SemiNmfConfig {
  int rank = 2;                      // k
  double spread_bound = M_PI / 4.0;  // epsilon, in (0, pi)
  int max_iterations = 500;          // i_max
  double alpha_max = 1.0;
  double decrease = 0.5;     // theta
  double increase = 2.0;     // gamma
  double contraction = 0.99;  // delta
  double forcing_coefficient = 1e-3;
  double forcing_exponent = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The orthonormal frame {mean, v, u} attached at a column w of W, with
/// w = cos(theta) mean + sin(theta) v and u the perturbation direction.
struct FrameAtColumn {
  Vector mean;
  Vector v;
  Vector u;  // zero when the ambient dimension is 2 (no third direction)
  double theta = 0.0;
};

enum class StepType { SearchA, SearchB, PollPlus, PollMinus, Fail };

std::string step_type_name(StepType type);

struct SemiNmfTraceRow {
  int i = 0;
  double eps = 0.0;
  double alpha = 0.0;
  StepType step = StepType::Fail;
};

struct SemiNmfResult {
  Factorization factorization;
  std::vector<SemiNmfTraceRow> trace;
  Vector karcher;  // the Karcher mean of the normalized data
};

/// Maximum pairwise geodesic distance between the unit columns of W.
double spread(const Matrix& w);

/// Karcher mean of unit columns (requires them inside an open hemisphere):
/// fixed point of the averaged sphere log maps.
Vector karcher_mean(const Matrix& unit_columns);

struct NnlsResult {
  Matrix h;             // >= 0 elementwise
  double residual_sq;   // |X - WH|_F^2
};

/// Column-separable non-negative least squares, active-set iteration.
NnlsResult nnls(const Matrix& x, const Matrix& w);

/// Builds the frame at w around the mean; u is drawn from rng when provided
/// (needed for perturbations), otherwise left zero.
FrameAtColumn make_frame(const Vector& mean, const Vector& w, RandomSource* rng);

/// Angle contraction toward the mean: returns cos(delta theta) mean +
/// sin(delta theta) v.
Vector contract_column(const FrameAtColumn& frame, double delta);

/// Angle dilation away from the mean; gamma * theta must stay below pi/2.
Vector dilate_column(const FrameAtColumn& frame, double gamma);

/// Out-of-plane perturbation cos(phi)[cos(theta_hat) mean + sin(theta_hat) v]
/// +/- sin(phi) u.
Vector perturb_column(const FrameAtColumn& frame, double theta_hat, double phi, int sign);

/// Observes the state after each iteration (and the initial state at i = 0).
using SemiNmfObserver = std::function<void(int i, const Matrix& w, const Matrix& h, double eps)>;

/// Runs the mesh-free direct search: search steps (pseudo-inverse with
/// contraction, random dilation), poll steps (+/- perturbations), step-size
/// update on failure. The fit error sequence is non-increasing and every
/// accepted W satisfies the spread constraint with unit columns.
SemiNmfResult fit(const DataMatrix& data, const SemiNmfConfig& cfg, RandomSource& rng,
                  const SemiNmfObserver& observer = {});

/// Ground-truth factorization for self-contained runs: unit columns of
/// w_true in a cone with S(w_true) <= eps/2, h_true strictly positive.
struct SyntheticSemiNmf {
  Matrix x;
  Matrix w_true;
  Matrix h_true;
};

SyntheticSemiNmf synthetic_seminmf(int n, int m, int k, double eps, RandomSource& rng);

}  // namespace kleinopt
