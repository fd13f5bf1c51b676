#include "storm/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "storm/error.hpp"

namespace storm::surrogate {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeEps = 1e-12;

void check_p(int p, int min_p, const char* who) {
  if (p < min_p) {
    throw InputError(std::string(who) + ": p must be >= " + std::to_string(min_p));
  }
}

// Clamp strictly inside (-1, 1) before dividing by sqrt(1 - t^2).
double interior(double t, const char* who) {
  if (std::abs(t) >= 1.0) {
    throw SingularityError(std::string(who) + ": derivative singular at |t| = 1");
  }
  return std::clamp(t, -(1.0 - kEdgeEps), 1.0 - kEdgeEps);
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

double f_half(double t) {
  return 1.0 - std::acos(std::clamp(t, -1.0, 1.0)) / kPi;
}

double prp_loss(double t, int p) {
  check_p(p, 1, "prp_loss");
  return 0.5 * ipow(f_half(t), p) + 0.5 * ipow(f_half(-t), p);
}

double prp_loss_slope(double t, int p) {
  check_p(p, 1, "prp_loss_slope");
  t = interior(t, "prp_loss_slope");
  const double num = p * (ipow(f_half(t), p - 1) - ipow(f_half(-t), p - 1));
  return num / (2.0 * kPi * std::sqrt(1.0 - t * t));
}

double hessian_coefficient(double t, int p) {
  check_p(p, 2, "hessian_coefficient");
  t = interior(t, "hessian_coefficient");
  const double fp = f_half(t);
  const double fn = f_half(-t);
  const double one_mt2 = 1.0 - t * t;
  const double curvature =
      p * (p - 1) * (ipow(fp, p - 2) + ipow(fn, p - 2)) / (2.0 * kPi * kPi * one_mt2);
  const double chain =
      p * t * (ipow(fp, p - 1) - ipow(fn, p - 1)) / (2.0 * kPi * std::pow(one_mt2, 1.5));
  return curvature + chain;
}

double classification_loss(double t, int p) {
  check_p(p, 1, "classification_loss");
  return ipow(2.0, p) * ipow(f_half(-t), p);
}

double classification_loss_slope(double t, int p) {
  check_p(p, 1, "classification_loss_slope");
  t = interior(t, "classification_loss_slope");
  return -ipow(2.0, p) * p * ipow(f_half(-t), p - 1) / (kPi * std::sqrt(1.0 - t * t));
}

std::vector<double> prp_gradient(std::span<const double> theta_tilde,
                                 std::span<const double> b, int p) {
  const size_t d = theta_tilde.size();
  if (b.size() != d && b.size() != d + 1) {
    throw InputError("prp_gradient: b must have length len(theta) or len(theta)+1");
  }
  double norm2 = 0.0;
  for (double v : theta_tilde) norm2 += v * v;
  if (norm2 == 0.0) throw InputError("prp_gradient: zero theta has no direction");
  const double norm = std::sqrt(norm2);
  double dot = 0.0;
  for (size_t i = 0; i < d; ++i) dot += theta_tilde[i] * b[i];
  const double t = dot / norm;
  const double slope = prp_loss_slope(t, p);
  // grad t = (b - t * u) / |theta~| with u the unit theta~ direction.
  std::vector<double> g(d);
  for (size_t i = 0; i < d; ++i) {
    g[i] = slope * (b[i] - t * theta_tilde[i] / norm) / norm;
  }
  return g;
}

RiskReport exact_empirical_risk(std::span<const double> theta, const Dataset& ds,
                                const SurrogateParams& params) {
  check_p(params.p, 1, "exact_empirical_risk");
  if (ds.size() == 0) throw InputError("exact_empirical_risk: empty dataset");
  for (double v : theta) {
    if (!std::isfinite(v)) throw InputError("exact_empirical_risk: non-finite theta");
  }

  RiskReport report;
  report.margins.reserve(ds.size());

  if (params.family == TaskKind::kRegression) {
    if (theta.size() != ds.dim) {
      throw InputError("exact_empirical_risk: theta length != feature dimension");
    }
    double norm2 = 1.0;  // the appended -1 target coordinate
    for (double v : theta) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    double loss = 0.0, sq = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) {
      const auto x = ds.x(i);
      double pred = 0.0;
      for (size_t j = 0; j < x.size(); ++j) pred += theta[j] * x[j];
      const double residual = pred - ds.y(i);
      const double t = residual / norm;
      report.margins.push_back(t);
      loss += prp_loss(t, params.p);
      sq += residual * residual;
    }
    report.mean_surrogate = loss / ds.size();
    report.mean_squared_error = sq / ds.size();
    return report;
  }

  if (theta.size() != ds.dim) {
    throw InputError("exact_empirical_risk: theta_tilde length != feature dimension");
  }
  double norm2 = 0.0;
  for (double v : theta) norm2 += v * v;
  if (norm2 == 0.0) throw InputError("exact_empirical_risk: zero classifier");
  const double norm = std::sqrt(norm2);
  double loss = 0.0;
  size_t wrong = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.x(i);
    double score = 0.0;
    for (size_t j = 0; j < x.size(); ++j) score += theta[j] * x[j];
    const double t = ds.label(i) * score / norm;
    report.margins.push_back(t);
    loss += classification_loss(t, params.p);
    if (t <= 0.0) ++wrong;
  }
  report.mean_surrogate = loss / ds.size();
  report.mean_squared_error = static_cast<double>(wrong) / ds.size();
  return report;
}

}  // namespace storm::surrogate
