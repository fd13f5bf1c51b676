#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storm/lsh.hpp"
#include "storm/sketch.hpp"

namespace storm {

enum class TaskKind : uint8_t {
  kRegression = 0,      // real target y
  kClassification = 1,  // label y in {-1, +1}
};

// How a dataset was brought into the unit ball, kept for round-trip
// reporting. Through-origin regression is invariant under the uniform
// scaling of [x, y], so a theta learned on scaled data applies to the raw
// data unchanged.
struct NormalizationRecord {
  bool normalized = false;
  double scale = 1.0;
  double c_max = 0.0;
  double max_row_norm = 0.0;
  bool bias_appended = false;  // classification: -1 coordinate added before scaling
  uint64_t clipped_rows = 0;   // streaming mode: rows clipped to the ball
  uint64_t source_hash = 0;    // FNV-1a over the raw numeric cells
};

struct Dataset {
  TaskKind task = TaskKind::kRegression;
  size_t dim = 0;                // feature dimension (includes bias once appended)
  std::vector<double> features;  // size() x dim, row-major
  std::vector<double> targets;
  NormalizationRecord norm;

  size_t size() const { return targets.size(); }
  std::span<const double> x(size_t i) const { return {features.data() + i * dim, dim}; }
  double y(size_t i) const { return targets[i]; }
  int label(size_t i) const { return targets[i] < 0 ? -1 : 1; }
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = false;
  // Column holding the target; negative counts from the end (-1 = last).
  int target_column = -1;
  TaskKind task = TaskKind::kRegression;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// Uniform scale s = c_max / max_i |row_i| so every row lands strictly inside
// the unit ball. Regression scales the concatenated [x, y]; classification
// appends the bias coordinate -1 to x first and scales the features only.
// `norm_bound`, when given, replaces the max-norm pass for true one-pass
// streaming; rows that exceed it are clipped onto the ball and counted.
Dataset normalize(const Dataset& ds, double c_max = 0.99,
                  std::optional<double> norm_bound = std::nullopt);

Dataset gen_synthetic_regression(size_t n, size_t d, std::span<const double> theta_star,
                                 double noise_sigma, uint64_t seed);

// Two 2D Gaussian blobs with labels +1 / -1, centers `separation` apart,
// placed away from the origin so a hyperplane with the [x, -1] bias
// convention can separate them.
Dataset gen_synthetic_classification(size_t n, double separation, uint64_t seed);

// Augmented insert vector for row i (unit norm): regression and composed
// sketches use augment_data([x, y]); classification uses the label-flipped
// transform.
std::vector<double> insert_vector(const Dataset& ds, size_t i);

// Augmented input dimension a sketch of this dataset needs.
uint32_t sketch_dim(const Dataset& ds);

// Query vector for a model: regression passes theta (dim reals), the -1
// target coordinate is appended here; classification passes theta_tilde
// (dim reals including the bias weight).
std::vector<double> query_vector(const Dataset& ds, std::span<const double> theta);
std::vector<double> query_vector_regression(std::span<const double> theta);

// Build a sketch of the whole (normalized) dataset in one pass.
Sketch build_sketch(const Dataset& ds, SketchFamily family, uint32_t p, uint32_t rows,
                    uint64_t seed, uint64_t memory_cap_bytes = Sketch::kDefaultMemoryCap);

}  // namespace storm
