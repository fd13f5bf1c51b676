#include "storm/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "storm/rng.hpp"

namespace storm {

const char* family_name(SketchFamily f) {
  switch (f) {
    case SketchFamily::kPrpRegression: return "prp";
    case SketchFamily::kClassification: return "classification";
    case SketchFamily::kComposed: return "composed";
  }
  return "unknown";
}

SketchFamily family_from_name(const std::string& name) {
  if (name == "prp" || name == "regression") return SketchFamily::kPrpRegression;
  if (name == "classification") return SketchFamily::kClassification;
  if (name == "composed") return SketchFamily::kComposed;
  throw InputError("unknown sketch family: " + name);
}

void HashFamilyConfig::validate() const {
  if (p < 1) throw InputError("hash config: p must be >= 1");
  const uint32_t max_p = family == SketchFamily::kComposed ? 14 : 28;
  if (p > max_p) {
    throw InputError("hash config: p = " + std::to_string(p) + " exceeds limit " +
                     std::to_string(max_p) + " for family " + family_name(family));
  }
  if (d_aug < 1) throw InputError("hash config: d_aug must be >= 1");
}

HashFunction::HashFunction(uint32_t p, uint32_t d_aug, uint64_t seed)
    : p_(p), d_aug_(d_aug), planes_(static_cast<size_t>(p) * d_aug) {
  if (p < 1 || d_aug < 1) throw InputError("HashFunction: p and d_aug must be >= 1");
  auto eng = make_engine(seed);
  NormalSampler normal;
  for (double& w : planes_) w = normal(eng);
}

uint32_t srp_hash(const HashFunction& fn, std::span<const double> v) {
  if (v.size() != fn.d_aug()) {
    throw InputError("srp_hash: vector length " + std::to_string(v.size()) +
                     " != d_aug " + std::to_string(fn.d_aug()));
  }
  uint32_t code = 0;
  for (uint32_t i = 0; i < fn.p(); ++i) {
    const auto w = fn.plane(i);
    double dot = 0.0;
    for (size_t j = 0; j < w.size(); ++j) dot += w[j] * v[j];
    if (dot > 0.0) code |= (1u << i);
  }
  return code;
}

namespace {

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

double collision_probability_srp(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("collision_probability_srp: length mismatch");
  const double nx = l2_norm(x);
  const double ny = l2_norm(y);
  if (nx == 0.0 || ny == 0.0) {
    throw InputError("collision_probability_srp: zero vector has no direction");
  }
  double dot = 0.0;
  for (size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  const double c = std::clamp(dot / (nx * ny), -1.0, 1.0);
  return 1.0 - std::acos(c) / std::numbers::pi;
}

std::vector<double> augment_data(std::span<const double> b) {
  double n2 = 0.0;
  for (double x : b) n2 += x * x;
  // Tolerate rounding right at the boundary, reject genuine violations.
  if (n2 > 1.0 + 1e-9) {
    throw NormalizationError("augment_data: |b| = " + std::to_string(std::sqrt(n2)) +
                             " lies outside the unit ball");
  }
  std::vector<double> out(b.begin(), b.end());
  out.push_back(std::sqrt(std::max(0.0, 1.0 - n2)));
  return out;
}

std::vector<double> augment_query(std::span<const double> q) {
  if (l2_norm(q) == 0.0) throw InputError("augment_query: zero query vector");
  std::vector<double> out(q.begin(), q.end());
  out.push_back(0.0);
  return out;
}

std::pair<uint32_t, uint32_t> prp_codes(const HashFunction& fn, std::span<const double> b_aug) {
  const uint32_t pos = srp_hash(fn, b_aug);
  const uint32_t mask = (fn.p() == 32) ? ~0u : ((1u << fn.p()) - 1u);
  return {pos, ~pos & mask};
}

std::vector<double> classification_transform(std::span<const double> x_bar, int label) {
  if (label != 1 && label != -1) {
    throw InputError("classification_transform: label must be +1 or -1, got " +
                     std::to_string(label));
  }
  std::vector<double> flipped(x_bar.size());
  for (size_t i = 0; i < x_bar.size(); ++i) flipped[i] = -label * x_bar[i];
  return augment_data(flipped);
}

uint64_t compose_product(uint64_t code1, uint64_t b1, uint64_t code2, uint64_t b2) {
  if (code1 >= b1) throw InputError("compose_product: code1 out of range");
  if (code2 >= b2) throw InputError("compose_product: code2 out of range");
  return code1 * b2 + code2;
}

}  // namespace storm
