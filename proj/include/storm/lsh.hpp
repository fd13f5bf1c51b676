#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "storm/error.hpp"

namespace storm {

// Sketch families. The value doubles as the on-disk family byte.
enum class SketchFamily : uint8_t {
  kPrpRegression = 0,   // paired random projections, two increments per insert
  kClassification = 1,  // single asymmetric inner-product hash, sign-flipped by label
  kComposed = 2,        // product of two independent SRP codes per row
};

const char* family_name(SketchFamily f);
SketchFamily family_from_name(const std::string& name);

// Hash ensemble configuration. `p` is the number of hyperplanes per SRP
// function; each code lies in [0, 2^p). Composed rows pair two independent
// p-bit functions, so their bucket count is 2^(2p).
struct HashFamilyConfig {
  SketchFamily family = SketchFamily::kPrpRegression;
  uint32_t p = 4;
  uint32_t d_aug = 0;
  uint64_t seed = 0;

  uint32_t buckets() const {
    return family == SketchFamily::kComposed ? (1u << (2 * p)) : (1u << p);
  }
  // Hash functions consumed per row (composed rows draw two).
  uint32_t functions_per_row() const {
    return family == SketchFamily::kComposed ? 2 : 1;
  }
  void validate() const;

  friend bool operator==(const HashFamilyConfig&, const HashFamilyConfig&) = default;
};

// One signed-random-projection function: p Gaussian hyperplanes over the
// augmented space. Immutable after construction; regenerating from the same
// seed reproduces the matrix exactly.
class HashFunction {
 public:
  HashFunction(uint32_t p, uint32_t d_aug, uint64_t seed);

  uint32_t p() const { return p_; }
  uint32_t d_aug() const { return d_aug_; }
  uint32_t buckets() const { return 1u << p_; }
  std::span<const double> plane(uint32_t i) const {
    return {planes_.data() + static_cast<size_t>(i) * d_aug_, d_aug_};
  }

 private:
  uint32_t p_;
  uint32_t d_aug_;
  std::vector<double> planes_;  // p x d_aug, row-major
};

// Code with bit i set iff <W_i, v> > 0. A projection of exactly zero maps to
// bit 0, which keeps the PRP complement identity deterministic.
uint32_t srp_hash(const HashFunction& fn, std::span<const double> v);

// Analytic SRP collision probability 1 - acos(cos angle)/pi. The cosine is
// clamped to [-1, 1] before acos.
double collision_probability_srp(std::span<const double> x, std::span<const double> y);

// Data-side augmentation [b, sqrt(1 - |b|^2)]. Output has unit norm.
std::vector<double> augment_data(std::span<const double> b);

// Query-side augmentation [q, 0]. The appended coordinate never contributes
// to inner products with augmented data, and SRP ignores the query scale.
std::vector<double> augment_query(std::span<const double> q);

// code_pos = srp_hash(fn, b), code_neg = bitwise complement of code_pos in p
// bits. The complement equals srp_hash(fn, -b) whenever no projection is
// exactly zero, and is always a distinct bucket.
std::pair<uint32_t, uint32_t> prp_codes(const HashFunction& fn, std::span<const double> b_aug);

// Classification insert vector: augment_data(-label * x_bar) for label in
// {-1, +1}. x_bar is the bias-augmented, normalized feature vector.
std::vector<double> classification_transform(std::span<const double> x_bar, int label);

// Mixed-radix pairing code1 * B2 + code2; injective on [0,B1) x [0,B2).
uint64_t compose_product(uint64_t code1, uint64_t b1, uint64_t code2, uint64_t b2);

}  // namespace storm
