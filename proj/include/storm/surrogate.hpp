#pragma once

#include <span>
#include <vector>

#include "storm/dataset.hpp"

namespace storm::surrogate {

// Closed-form surrogate losses and their derivatives. These are the exact
// quantities the sketch estimates; the sketch-free evaluations here serve as
// the ground-truth oracle in tests and for the exact trainer.

struct SurrogateParams {
  int p = 4;
  TaskKind family = TaskKind::kRegression;
};

struct RiskReport {
  double mean_surrogate = 0.0;
  // Regression: mean squared residual. Classification: 0-1 training error.
  double mean_squared_error = 0.0;
  std::vector<double> margins;  // t_i = <theta~, b_i> / |theta~|
};

// Half-collision probability 1 - acos(t)/pi, monotone increasing on [-1, 1].
double f_half(double t);

// PRP surrogate (f_half(t)^p + f_half(-t)^p) / 2; even in t, minimized at
// t = 0 for p >= 2.
double prp_loss(double t, int p);

// d/dt prp_loss. Singular at |t| = 1.
double prp_loss_slope(double t, int p);

// Scalar rho in the Hessian factorization d^2/dtheta^2 = b b^T rho; equals
// the second derivative of prp_loss in t. Positive on (-1, 1) for p >= 2.
double hessian_coefficient(double t, int p);

// Margin loss 2^p f_half(-t)^p; phi(0) = 1, strictly decreasing in t.
double classification_loss(double t, int p);

// d/dt classification_loss; equals -2p/pi at t = 0.
double classification_loss_slope(double t, int p);

// Gradient of prp_loss(t(theta~), p) in theta~, where t is the normalized
// inner product <theta~, b> / |theta~|. Accepts b either as the plain
// concatenated [x, y] (length = theta~) or as the augmented data vector
// (one trailing coordinate, which the query side zeroes out).
std::vector<double> prp_gradient(std::span<const double> theta_tilde,
                                 std::span<const double> b, int p);

// Exact summation oracle: mean family loss at the normalized margins, plus
// the least-squares MSE (or 0-1 error) for comparison. No sketch involved.
RiskReport exact_empirical_risk(std::span<const double> theta, const Dataset& ds,
                                const SurrogateParams& params);

}  // namespace storm::surrogate
