#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "storm/lsh.hpp"

namespace storm {

// Result of a loss-estimate query.
struct LossEstimate {
  double value = 0.0;           // estimated mean surrogate loss, >= 0
  double raw_mean_count = 0.0;  // mean counter value at the query buckets
  uint32_t rows_used = 0;
};

struct EstimateOptions {
  // 0 or 1 = plain row mean (the default estimator). With g > 1 groups the
  // raw value is the median of g group means, which trades a little bias for
  // outlier protection on adversarial streams.
  uint32_t median_of_means_groups = 0;
};

// The count sketch: an R x B array of 32-bit counters plus the hash
// configuration and the insert count N. The array is the entire compressed
// dataset; merging two sketches built from the same seed is exact.
class Sketch {
 public:
  static constexpr uint64_t kDefaultMemoryCap = 1ull << 30;
  static constexpr size_t kHeaderBytes = 36;

  Sketch(HashFamilyConfig config, uint32_t rows,
         uint64_t memory_cap_bytes = kDefaultMemoryCap);

  const HashFamilyConfig& config() const { return config_; }
  uint32_t rows() const { return rows_; }
  uint32_t buckets() const { return config_.buckets(); }
  uint64_t insert_count() const { return inserts_; }
  bool saturated() const { return saturated_; }
  uint64_t memory_footprint_bytes() const {
    return kHeaderBytes + 4ull * rows_ * buckets();
  }

  std::span<const uint32_t> counts() const { return counts_; }
  std::span<const uint32_t> row(uint32_t r) const {
    return {counts_.data() + static_cast<size_t>(r) * buckets(), buckets()};
  }

  // Insert an already normalized and augmented point (unit-norm vector of
  // length d_aug). PRP rows increment the pair of complementary buckets, the
  // other families increment one. Counters saturate at 2^32-1 with a
  // one-time warning instead of failing the stream.
  void insert(std::span<const double> b_aug);

  // Mean counter value at the query's bucket in every row. Read-only.
  double query(std::span<const double> q_aug) const;

  // query() rescaled to an unbiased estimate of the mean surrogate loss:
  // raw / 2N for PRP, 2^p raw / N for classification, raw / N for composed.
  LossEstimate estimate_mean_loss(std::span<const double> q_aug,
                                  const EstimateOptions& opts = {}) const;

  // Element-wise counter addition; requires identical headers.
  void add(const Sketch& other);

  std::vector<uint8_t> serialize() const;
  static Sketch deserialize(std::span<const uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static Sketch load(const std::filesystem::path& path);

  // Bucket index of v in row r (the composed family pairs its two codes).
  uint32_t row_code(uint32_t r, std::span<const double> v) const;

  friend bool operator==(const Sketch& a, const Sketch& b) {
    return a.config_ == b.config_ && a.rows_ == b.rows_ &&
           a.inserts_ == b.inserts_ && a.counts_ == b.counts_;
  }

 private:
  void bump(uint32_t r, uint32_t bucket);
  double raw_query_value(std::span<const double> q_aug, uint32_t mom_groups) const;

  HashFamilyConfig config_;
  uint32_t rows_;
  std::vector<HashFunction> fns_;  // rows * functions_per_row, row-major
  std::vector<uint32_t> counts_;   // rows x buckets, row-major
  uint64_t inserts_ = 0;
  mutable bool saturated_ = false;
};

Sketch merge(const Sketch& a, const Sketch& b);

// w1 * estimate(s1, q) + w2 * estimate(s2, q): linear combinations of two
// sketched losses (closure under addition and subtraction).
double combine_weighted(const Sketch& s1, double w1, const Sketch& s2, double w2,
                        std::span<const double> q_aug);

}  // namespace storm
