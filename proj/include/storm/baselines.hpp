#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "storm/dataset.hpp"
#include "storm/optimizer.hpp"

namespace storm {

// Byte budget shared by the comparison protocol. Capacities follow the
// 4-bytes-per-real accounting convention used for all methods: a retained or
// sketched row of [x, y] costs 4 (d+1) bytes.
struct MemoryBudget {
  uint64_t bytes = 0;

  uint64_t row_capacity(size_t d) const { return bytes / (4ull * (d + 1)); }
  // Counter rows a STORM sketch of width `buckets` fits after its header.
  uint64_t storm_rows(uint32_t buckets) const {
    if (bytes <= Sketch::kHeaderBytes) return 0;
    return (bytes - Sketch::kHeaderBytes) / (4ull * buckets);
  }
};

struct ReservoirResult {
  OlsSolution solution;
  uint64_t retained = 0;
  bool under_determined = false;
};

// Single-pass uniform reservoir of capacity budget.row_capacity(d), then
// least squares on the retained rows. With capacity >= N the reservoir keeps
// every row in stream order, so the result equals full-data OLS exactly.
ReservoirResult reservoir_sample_train(const Dataset& ds, const MemoryBudget& budget,
                                       uint64_t seed);

// Count-sketch subspace embedding of the concatenated [x, y] rows: every
// input row lands in one uniformly chosen output row with a random sign.
// Row and sign are functions of (seed, stream index), so shards built from
// the same seed over a partition of the stream merge exactly.
class CwSketch {
 public:
  CwSketch(uint64_t rows, size_t dim, uint64_t seed);

  void insert(uint64_t index, std::span<const double> x, double y);
  void add(const CwSketch& other);

  uint64_t rows() const { return rows_; }
  size_t dim() const { return dim_; }
  uint64_t inserted() const { return inserted_; }
  std::span<const double> row(uint64_t r) const { return {data_.data() + r * (dim_ + 1), dim_ + 1}; }

  // Least squares on the sketched system (ridge-rescued when degenerate).
  OlsSolution solve() const;

 private:
  uint64_t rows_;
  size_t dim_;  // feature dimension; stored width is dim + 1
  uint64_t seed_;
  uint64_t inserted_ = 0;
  std::vector<double> data_;  // rows x (dim + 1), row-major
};

struct CwResult {
  OlsSolution solution;
  uint64_t sketch_rows = 0;
};

CwResult cw_sketch_train(const Dataset& ds, uint64_t sketch_rows, uint64_t seed);

}  // namespace storm
