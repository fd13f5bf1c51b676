#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "storm/baselines.hpp"
#include "storm/dataset.hpp"
#include "storm/optimizer.hpp"

namespace storm {

// One (method, budget, seed) cell of a memory sweep. Every row carries
// enough metadata to re-run it in isolation.
struct ExperimentResult {
  std::string method;
  uint64_t budget_bytes = 0;
  uint64_t seed = 0;
  bool skipped = false;
  std::string skip_reason;
  uint64_t used_bytes = 0;
  double mse = 0.0;        // training MSE of the learned model on the full dataset
  double param_err = 0.0;  // |theta - theta_ols| / |theta_ols|
  double seconds = 0.0;
};

struct SweepConfig {
  std::vector<uint64_t> budgets;
  std::vector<std::string> methods = {"storm", "reservoir", "cw"};
  std::vector<uint64_t> seeds;
  uint32_t p = 4;
  OptimizerConfig optimizer;  // storm training parameters; seed set per cell
};

// Build each structure within its byte budget, train, and score against the
// full dataset and its OLS solution. STORM always streams the entire dataset
// through the sketch; the baselines are capacity-limited. Infeasible budgets
// are recorded as skipped rather than failing the sweep. Results come back
// sorted by (method, budget, seed).
std::vector<ExperimentResult> run_sweep(const Dataset& normalized, const SweepConfig& cfg);

void write_results_csv(std::span<const ExperimentResult> results,
                       const std::filesystem::path& path);
void write_results_json(std::span<const ExperimentResult> results,
                        const std::filesystem::path& path);

struct EdgeMergeParams {
  size_t shards = 8;
  SketchFamily family = SketchFamily::kPrpRegression;
  uint32_t p = 4;
  uint32_t rows = 100;
  uint64_t seed = 0;
  OptimizerConfig optimizer;
};

struct EdgeMergeReport {
  size_t shards = 0;
  uint64_t points = 0;
  uint64_t sketch_bytes = 0;
  uint64_t transmitted_bytes = 0;  // (shards - 1) merges, one sketch each
  uint64_t raw_bytes = 0;          // the stream as 8-byte reals, for contrast
  bool sketch_bit_equal = false;   // merged == single-pass
  bool theta_bit_equal = false;    // training on either gives identical params
  std::vector<double> theta;
};

// Shard the stream, sketch each shard with the shared seed, merge the shard
// sketches pairwise along a random tree, and compare against the single-pass
// sketch of the unsharded stream.
EdgeMergeReport simulate_edge_merge(const Dataset& normalized, const EdgeMergeParams& params);

}  // namespace storm
