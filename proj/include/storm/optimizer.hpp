#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "storm/dataset.hpp"
#include "storm/sketch.hpp"
#include "storm/surrogate.hpp"

namespace storm {

enum class EtaDecay : uint8_t { kNone = 0, kInverseSqrt = 1 };

struct OptimizerConfig {
  uint32_t queries = 8;       // k sphere queries per step
  double sigma = 0.5;         // sphere radius
  double eta = 0.1;           // step size
  uint32_t iterations = 100;  // 0 is allowed and returns the initial point
  uint64_t seed = 0;
  EtaDecay eta_decay = EtaDecay::kNone;

  void validate() const;
};

struct TraceEntry {
  uint32_t iteration = 0;  // 1-based
  double loss = 0.0;       // estimate at the iteration's starting point
  std::vector<double> theta_tilde;  // snapshot after the update, last coord -1
  double seconds = 0.0;    // wall clock since training started
};

struct TrainTrace {
  std::vector<TraceEntry> entries;
  std::vector<double> theta_tilde;  // final constrained parameter

  // Model coefficients without the constrained -1 coordinate.
  std::vector<double> theta() const {
    return {theta_tilde.begin(), theta_tilde.empty() ? theta_tilde.end() : theta_tilde.end() - 1};
  }
};

// Pin the constrained coordinate: last entry set to -1, others untouched.
void project_constraint(std::vector<double>& theta_tilde);

// Derivative-free training against a sketch. Each iteration queries the
// sketch at the current point and at k uniform points on the sigma-sphere
// around it, forms the sphere-smoothing gradient estimate
//   g = dim / (k sigma^2) * sum_j (delta_j - delta_0) (v_j - theta~),
// steps, and re-projects the last coordinate onto -1. Deterministic per
// (sketch bytes, cfg).
TrainTrace dfo_train(const Sketch& sketch, const OptimizerConfig& cfg);

// Noise-free oracle for dfo_train: full-batch gradient descent on the exact
// PRP surrogate with the same constraint projection. Regression only.
TrainTrace exact_surrogate_train(const Dataset& ds, const surrogate::SurrogateParams& params,
                                 const OptimizerConfig& cfg);

struct OlsSolution {
  std::vector<double> theta;
  bool used_ridge = false;
};

// Normal-equation least squares. A ridge of 1e-8 I is added only when the
// plain system is numerically singular, and that rescue is reported.
OlsSolution ols_solve(const Dataset& ds);
OlsSolution ols_solve_raw(std::span<const double> features, std::span<const double> targets,
                          size_t dim);

// One JSON object per line: {"iteration":..,"loss":..,"theta_tilde":[..]}.
std::string trace_to_json_lines(const TrainTrace& trace);

}  // namespace storm
