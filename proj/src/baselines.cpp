#include "storm/baselines.hpp"

#include <iostream>

#include "storm/rng.hpp"

namespace storm {

ReservoirResult reservoir_sample_train(const Dataset& ds, const MemoryBudget& budget,
                                       uint64_t seed) {
  if (ds.size() == 0) throw InputError("reservoir_sample_train: empty stream");
  const uint64_t capacity = budget.row_capacity(ds.dim);
  if (capacity < 1) {
    throw CapacityError("reservoir_sample_train: budget below one row");
  }

  auto eng = make_engine(mix_seed(seed, 0x52455356ull));
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(std::min<uint64_t>(capacity, ds.size()) * ds.dim);
  ys.reserve(std::min<uint64_t>(capacity, ds.size()));

  for (size_t i = 0; i < ds.size(); ++i) {
    if (ys.size() < capacity) {
      const auto x = ds.x(i);
      xs.insert(xs.end(), x.begin(), x.end());
      ys.push_back(ds.y(i));
      continue;
    }
    const uint64_t j = eng() % (i + 1);
    if (j < capacity) {
      const auto x = ds.x(i);
      std::copy(x.begin(), x.end(), xs.begin() + static_cast<ptrdiff_t>(j * ds.dim));
      ys[j] = ds.y(i);
    }
  }

  ReservoirResult out;
  out.retained = ys.size();
  out.under_determined = out.retained < ds.dim + 1;
  if (out.under_determined) {
    std::cerr << "storm: warning: reservoir holds " << out.retained
              << " rows for dimension " << ds.dim << "; solve is under-determined\n";
  }
  out.solution = ols_solve_raw(xs, ys, ds.dim);
  return out;
}

CwSketch::CwSketch(uint64_t rows, size_t dim, uint64_t seed)
    : rows_(rows), dim_(dim), seed_(seed) {
  if (rows < 1 || dim < 1) throw InputError("CwSketch: need rows >= 1 and dim >= 1");
  data_.assign(rows * (dim + 1), 0.0);
}

void CwSketch::insert(uint64_t index, std::span<const double> x, double y) {
  if (x.size() != dim_) throw InputError("CwSketch::insert: row dimension mismatch");
  const uint64_t u = mix_seed(seed_, index);
  const uint64_t r = u % rows_;
  const double sign = (u >> 63) ? -1.0 : 1.0;
  double* slot = data_.data() + r * (dim_ + 1);
  for (size_t j = 0; j < dim_; ++j) slot[j] += sign * x[j];
  slot[dim_] += sign * y;
  ++inserted_;
}

void CwSketch::add(const CwSketch& other) {
  if (rows_ != other.rows_ || dim_ != other.dim_ || seed_ != other.seed_) {
    throw IncompatibleSketchError("CwSketch::add: mismatched rows, dim, or seed");
  }
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  inserted_ += other.inserted_;
}

OlsSolution CwSketch::solve() const {
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(rows_ * dim_);
  ys.reserve(rows_);
  for (uint64_t r = 0; r < rows_; ++r) {
    const double* slot = data_.data() + r * (dim_ + 1);
    xs.insert(xs.end(), slot, slot + dim_);
    ys.push_back(slot[dim_]);
  }
  auto out = ols_solve_raw(xs, ys, dim_);
  if (out.used_ridge) {
    std::cerr << "storm: warning: sketched least-squares system was rank deficient;"
                 " ridge rescue applied\n";
  }
  return out;
}

CwResult cw_sketch_train(const Dataset& ds, uint64_t sketch_rows, uint64_t seed) {
  if (ds.size() == 0) throw InputError("cw_sketch_train: empty stream");
  if (sketch_rows < ds.dim + 1) {
    throw InputError("cw_sketch_train: need at least d+1 sketch rows");
  }
  CwSketch sketch(sketch_rows, ds.dim, seed);
  for (size_t i = 0; i < ds.size(); ++i) sketch.insert(i, ds.x(i), ds.y(i));
  return {sketch.solve(), sketch_rows};
}

}  // namespace storm
