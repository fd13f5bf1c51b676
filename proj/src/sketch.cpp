#include "storm/sketch.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "storm/rng.hpp"

namespace storm {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'R', 'M'};
constexpr uint16_t kVersion = 1;

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

struct ByteReader {
  std::span<const uint8_t> bytes;
  size_t pos = 0;

  void need(size_t n, const char* what) {
    if (pos + n > bytes.size()) {
      throw ParseError(std::string("sketch bytes truncated while reading ") + what);
    }
  }
  uint8_t u8(const char* what) {
    need(1, what);
    return bytes[pos++];
  }
  uint16_t u16(const char* what) {
    need(2, what);
    uint16_t v = static_cast<uint16_t>(bytes[pos]) |
                 static_cast<uint16_t>(bytes[pos + 1]) << 8;
    pos += 2;
    return v;
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(bytes[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(bytes[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
};

}  // namespace

Sketch::Sketch(HashFamilyConfig config, uint32_t rows, uint64_t memory_cap_bytes)
    : config_(config), rows_(rows) {
  config_.validate();
  if (rows < 1) throw InputError("Sketch: need at least one row");
  const uint64_t bytes = 4ull * rows * config_.buckets();
  if (bytes > memory_cap_bytes) {
    throw CapacityError("Sketch: " + std::to_string(bytes) +
                        " bytes of counters exceed the cap of " +
                        std::to_string(memory_cap_bytes));
  }
  counts_.assign(static_cast<size_t>(rows) * config_.buckets(), 0);
  const uint32_t per_row = config_.functions_per_row();
  fns_.reserve(static_cast<size_t>(rows) * per_row);
  for (uint32_t r = 0; r < rows; ++r) {
    for (uint32_t c = 0; c < per_row; ++c) {
      fns_.emplace_back(config_.p, config_.d_aug,
                        mix_seed(config_.seed, static_cast<uint64_t>(r) * per_row + c));
    }
  }
}

void Sketch::bump(uint32_t r, uint32_t bucket) {
  uint32_t& c = counts_[static_cast<size_t>(r) * buckets() + bucket];
  if (c == std::numeric_limits<uint32_t>::max()) {
    if (!saturated_) {
      std::cerr << "storm: warning: counter saturation in row " << r
                << "; further increments are dropped\n";
      saturated_ = true;
    }
    return;
  }
  ++c;
}

uint32_t Sketch::row_code(uint32_t r, std::span<const double> v) const {
  if (config_.family == SketchFamily::kComposed) {
    const uint32_t b = 1u << config_.p;
    const uint32_t c1 = srp_hash(fns_[2 * r], v);
    const uint32_t c2 = srp_hash(fns_[2 * r + 1], v);
    return static_cast<uint32_t>(compose_product(c1, b, c2, b));
  }
  return srp_hash(fns_[r], v);
}

void Sketch::insert(std::span<const double> b_aug) {
  if (b_aug.size() != config_.d_aug) {
    throw InputError("Sketch::insert: vector length " + std::to_string(b_aug.size()) +
                     " != d_aug " + std::to_string(config_.d_aug));
  }
  if (config_.family == SketchFamily::kPrpRegression) {
    for (uint32_t r = 0; r < rows_; ++r) {
      const auto [pos, neg] = prp_codes(fns_[r], b_aug);
      bump(r, pos);
      bump(r, neg);
    }
  } else {
    for (uint32_t r = 0; r < rows_; ++r) bump(r, row_code(r, b_aug));
  }
  ++inserts_;
}

double Sketch::raw_query_value(std::span<const double> q_aug, uint32_t mom_groups) const {
  if (inserts_ == 0) throw EmptySketchError("Sketch::query: sketch holds no inserts");
  if (q_aug.size() != config_.d_aug) {
    throw InputError("Sketch::query: vector length " + std::to_string(q_aug.size()) +
                     " != d_aug " + std::to_string(config_.d_aug));
  }
  if (mom_groups > 1) {
    const uint32_t g = std::min(mom_groups, rows_);
    std::vector<double> means(g, 0.0);
    std::vector<uint32_t> sizes(g, 0);
    for (uint32_t r = 0; r < rows_; ++r) {
      const uint32_t grp = r % g;
      means[grp] += row(r)[row_code(r, q_aug)];
      ++sizes[grp];
    }
    for (uint32_t i = 0; i < g; ++i) means[i] /= sizes[i];
    std::nth_element(means.begin(), means.begin() + g / 2, means.end());
    double med = means[g / 2];
    if (g % 2 == 0) {
      const double lo = *std::max_element(means.begin(), means.begin() + g / 2);
      med = 0.5 * (med + lo);
    }
    return med;
  }
  double sum = 0.0;
  for (uint32_t r = 0; r < rows_; ++r) sum += row(r)[row_code(r, q_aug)];
  return sum / rows_;
}

double Sketch::query(std::span<const double> q_aug) const {
  return raw_query_value(q_aug, 0);
}

LossEstimate Sketch::estimate_mean_loss(std::span<const double> q_aug,
                                        const EstimateOptions& opts) const {
  LossEstimate est;
  est.raw_mean_count = raw_query_value(q_aug, opts.median_of_means_groups);
  est.rows_used = rows_;
  const double n = static_cast<double>(inserts_);
  switch (config_.family) {
    case SketchFamily::kPrpRegression:
      est.value = est.raw_mean_count / (2.0 * n);
      break;
    case SketchFamily::kClassification:
      est.value = static_cast<double>(1u << config_.p) * est.raw_mean_count / n;
      break;
    case SketchFamily::kComposed:
      est.value = est.raw_mean_count / n;
      break;
  }
  return est;
}

void Sketch::add(const Sketch& other) {
  std::string diffs;
  auto differ = [&diffs](const char* field) {
    if (!diffs.empty()) diffs += ", ";
    diffs += field;
  };
  if (config_.family != other.config_.family) differ("family");
  if (config_.p != other.config_.p) differ("p");
  if (config_.d_aug != other.config_.d_aug) differ("d_aug");
  if (config_.seed != other.config_.seed) differ("seed");
  if (rows_ != other.rows_) differ("rows");
  if (!diffs.empty()) {
    throw IncompatibleSketchError("Sketch::add: sketches differ in " + diffs);
  }
  for (size_t i = 0; i < counts_.size(); ++i) {
    const uint64_t sum = static_cast<uint64_t>(counts_[i]) + other.counts_[i];
    if (sum > std::numeric_limits<uint32_t>::max()) {
      if (!saturated_) {
        std::cerr << "storm: warning: counter saturation while merging\n";
        saturated_ = true;
      }
      counts_[i] = std::numeric_limits<uint32_t>::max();
    } else {
      counts_[i] = static_cast<uint32_t>(sum);
    }
  }
  inserts_ += other.inserts_;
}

Sketch merge(const Sketch& a, const Sketch& b) {
  Sketch out = a;
  out.add(b);
  return out;
}

double combine_weighted(const Sketch& s1, double w1, const Sketch& s2, double w2,
                        std::span<const double> q_aug) {
  return w1 * s1.estimate_mean_loss(q_aug).value + w2 * s2.estimate_mean_loss(q_aug).value;
}

std::vector<uint8_t> Sketch::serialize() const {
  std::vector<uint8_t> out;
  out.reserve(kHeaderBytes + 4 * counts_.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, kVersion);
  out.push_back(static_cast<uint8_t>(config_.family));
  out.push_back(static_cast<uint8_t>(config_.p));
  put_u32(out, config_.d_aug);
  put_u32(out, rows_);
  put_u32(out, buckets());
  put_u64(out, config_.seed);
  put_u64(out, inserts_);
  for (uint32_t c : counts_) put_u32(out, c);
  return out;
}

Sketch Sketch::deserialize(std::span<const uint8_t> bytes) {
  ByteReader rd{bytes};
  rd.need(4, "magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw ParseError("sketch bytes: bad magic (expected \"STRM\")");
  }
  rd.pos = 4;
  const uint16_t version = rd.u16("version");
  if (version != kVersion) {
    throw ParseError("sketch bytes: unsupported version " + std::to_string(version));
  }
  const uint8_t family_byte = rd.u8("family");
  if (family_byte > 2) {
    throw ParseError("sketch bytes: unknown family " + std::to_string(family_byte));
  }
  HashFamilyConfig config;
  config.family = static_cast<SketchFamily>(family_byte);
  config.p = rd.u8("p");
  config.d_aug = rd.u32("d_aug");
  const uint32_t rows = rd.u32("rows");
  const uint32_t buckets = rd.u32("buckets");
  config.seed = rd.u64("seed");
  const uint64_t inserts = rd.u64("insert count");
  config.validate();
  if (rows < 1) throw ParseError("sketch bytes: zero rows");
  if (buckets != config.buckets()) {
    throw ParseError("sketch bytes: bucket count " + std::to_string(buckets) +
                     " inconsistent with p = " + std::to_string(config.p));
  }
  Sketch s(config, rows, std::numeric_limits<uint64_t>::max());
  for (auto& c : s.counts_) c = rd.u32("counters");
  if (rd.pos != bytes.size()) {
    throw ParseError("sketch bytes: " + std::to_string(bytes.size() - rd.pos) +
                     " trailing bytes");
  }
  s.inserts_ = inserts;
  return s;
}

void Sketch::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  const auto bytes = serialize();
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing sketch to " + path.string());
}

Sketch Sketch::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open sketch file " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace storm
