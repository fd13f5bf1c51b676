#include "storm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "storm/rng.hpp"

namespace storm {

namespace {

uint64_t fnv1a_update(uint64_t h, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
  return h;
}

double row_norm(std::span<const double> x, double y) {
  double s = y * y;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double feature_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  size_t line_no = 0;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && opts.has_header) continue;
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    size_t col = 0;
    while (std::getline(ss, cell, opts.delimiter)) {
      ++col;
      try {
        size_t used = 0;
        const double v = std::stod(cell, &used);
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) throw std::invalid_argument(cell);
        cells.push_back(v);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": column " +
                         std::to_string(col) + ": not numeric: \"" + cell + "\"");
      }
    }
    if (!rows.empty() && cells.size() != rows.front().size()) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " +
                       std::to_string(cells.size()));
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw InputError(path.string() + ": no data rows");
  const size_t cols = rows.front().size();
  if (cols < 2) throw InputError(path.string() + ": need at least one feature and a target");
  int target = opts.target_column;
  if (target < 0) target += static_cast<int>(cols);
  if (target < 0 || target >= static_cast<int>(cols)) {
    throw InputError(path.string() + ": target column out of range");
  }

  Dataset ds;
  ds.task = opts.task;
  ds.dim = cols - 1;
  ds.features.reserve(rows.size() * ds.dim);
  ds.targets.reserve(rows.size());
  uint64_t hash = 0xcbf29ce484222325ull;
  for (const auto& r : rows) {
    for (size_t c = 0; c < cols; ++c) {
      hash = fnv1a_update(hash, r[c]);
      if (static_cast<int>(c) == target) {
        ds.targets.push_back(r[c]);
      } else {
        ds.features.push_back(r[c]);
      }
    }
  }
  ds.norm.source_hash = hash;
  if (ds.task == TaskKind::kClassification) {
    for (double y : ds.targets) {
      if (y != 1.0 && y != -1.0) {
        throw InputError(path.string() + ": classification labels must be +1 or -1");
      }
    }
  }
  return ds;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.precision(17);
  for (size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.x(i)) out << v << ',';
    out << ds.y(i) << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

Dataset normalize(const Dataset& ds, double c_max, std::optional<double> norm_bound) {
  if (ds.size() == 0) throw InputError("normalize: empty dataset");
  if (c_max <= 0.0 || c_max >= 1.0) throw InputError("normalize: c_max must lie in (0, 1)");

  Dataset out;
  out.task = ds.task;
  out.norm = ds.norm;
  const bool classification = ds.task == TaskKind::kClassification;

  // Classification folds the intercept into the data as a -1 coordinate.
  std::vector<double> features;
  const size_t dim = classification ? ds.dim + 1 : ds.dim;
  features.reserve(ds.size() * dim);
  for (size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.x(i);
    features.insert(features.end(), x.begin(), x.end());
    if (classification) features.push_back(-1.0);
  }

  double max_norm = 0.0;
  for (size_t i = 0; i < ds.size(); ++i) {
    std::span<const double> x{features.data() + i * dim, dim};
    const double n = classification ? feature_norm(x) : row_norm(x, ds.y(i));
    max_norm = std::max(max_norm, n);
  }
  if (max_norm == 0.0) throw InputError("normalize: degenerate all-zero dataset");

  const double bound = norm_bound.value_or(max_norm);
  if (bound <= 0.0) throw InputError("normalize: norm bound must be positive");
  const double scale = c_max / bound;

  out.dim = dim;
  out.features = std::move(features);
  out.targets = ds.targets;
  uint64_t clipped = 0;
  for (size_t i = 0; i < ds.size(); ++i) {
    double* x = out.features.data() + i * dim;
    for (size_t j = 0; j < dim; ++j) x[j] *= scale;
    if (!classification) out.targets[i] *= scale;
    std::span<const double> xs{x, dim};
    double n = classification ? feature_norm(xs) : row_norm(xs, out.targets[i]);
    if (n > c_max) {
      // Out-of-bound row under a user-supplied bound: clip onto the ball.
      ++clipped;
      const double shrink = c_max / n;
      for (size_t j = 0; j < dim; ++j) x[j] *= shrink;
      if (!classification) out.targets[i] *= shrink;
    }
  }
  out.norm.normalized = true;
  out.norm.scale = scale;
  out.norm.c_max = c_max;
  out.norm.max_row_norm = max_norm;
  out.norm.bias_appended = classification;
  out.norm.clipped_rows = clipped;
  return out;
}

Dataset gen_synthetic_regression(size_t n, size_t d, std::span<const double> theta_star,
                                 double noise_sigma, uint64_t seed) {
  if (n < 1 || d < 1) throw InputError("gen_synthetic_regression: need n >= 1, d >= 1");
  if (theta_star.size() != d) throw InputError("gen_synthetic_regression: theta length != d");
  Dataset ds;
  ds.dim = d;
  ds.features.reserve(n * d);
  ds.targets.reserve(n);
  auto eng = make_engine(mix_seed(seed, 0x5356474eull));
  NormalSampler normal;
  std::vector<double> x(d);
  for (size_t i = 0; i < n; ++i) {
    // Uniform in the unit ball: Gaussian direction, radius u^(1/d).
    double norm2 = 0.0;
    for (auto& v : x) {
      v = normal(eng);
      norm2 += v * v;
    }
    const double r = std::pow(uniform01(eng), 1.0 / static_cast<double>(d)) /
                     std::max(std::sqrt(norm2), 1e-300);
    double dot = 0.0;
    for (size_t j = 0; j < d; ++j) {
      x[j] *= r;
      dot += theta_star[j] * x[j];
    }
    ds.features.insert(ds.features.end(), x.begin(), x.end());
    ds.targets.push_back(dot + noise_sigma * normal(eng));
  }
  return ds;
}

Dataset gen_synthetic_classification(size_t n, double separation, uint64_t seed) {
  if (n < 2) throw InputError("gen_synthetic_classification: need n >= 2");
  Dataset ds;
  ds.task = TaskKind::kClassification;
  ds.dim = 2;
  ds.features.reserve(n * 2);
  ds.targets.reserve(n);
  auto eng = make_engine(mix_seed(seed, 0x434c5346ull));
  NormalSampler normal;
  // Both blobs live in the positive quadrant so the separating hyperplane
  // avoids the origin (the bias convention fixes hyperplanes w.x = 1).
  const double ux = 1.0 / std::sqrt(2.0), uy = ux;
  const double cx = 2.0, cy = 2.0;
  for (size_t i = 0; i < n; ++i) {
    const int label = (i % 2 == 0) ? 1 : -1;
    const double off = 0.5 * separation * label;
    ds.features.push_back(cx + off * ux + 0.5 * normal(eng));
    ds.features.push_back(cy + off * uy + 0.5 * normal(eng));
    ds.targets.push_back(label);
  }
  return ds;
}

std::vector<double> insert_vector(const Dataset& ds, size_t i) {
  if (i >= ds.size()) throw InputError("insert_vector: row index out of range");
  if (ds.task == TaskKind::kClassification) {
    return classification_transform(ds.x(i), ds.label(i));
  }
  std::vector<double> row(ds.x(i).begin(), ds.x(i).end());
  row.push_back(ds.y(i));
  return augment_data(row);
}

uint32_t sketch_dim(const Dataset& ds) {
  const size_t d = ds.task == TaskKind::kClassification ? ds.dim + 1 : ds.dim + 2;
  return static_cast<uint32_t>(d);
}

std::vector<double> query_vector_regression(std::span<const double> theta) {
  std::vector<double> q(theta.begin(), theta.end());
  q.push_back(-1.0);
  return augment_query(q);
}

std::vector<double> query_vector(const Dataset& ds, std::span<const double> theta) {
  if (ds.task == TaskKind::kRegression) {
    if (theta.size() != ds.dim) throw InputError("query_vector: theta length != dim");
    return query_vector_regression(theta);
  }
  if (theta.size() != ds.dim) {
    throw InputError("query_vector: theta_tilde length != dim (bias weight included)");
  }
  return augment_query(theta);
}

Sketch build_sketch(const Dataset& ds, SketchFamily family, uint32_t p, uint32_t rows,
                    uint64_t seed, uint64_t memory_cap_bytes) {
  if (!ds.norm.normalized) throw InputError("build_sketch: dataset must be normalized first");
  const bool labels = ds.task == TaskKind::kClassification;
  if ((family == SketchFamily::kClassification) != labels) {
    throw InputError(std::string("build_sketch: family ") + family_name(family) +
                     " does not match the dataset task");
  }
  HashFamilyConfig config{family, p, sketch_dim(ds), seed};
  Sketch s(config, rows, memory_cap_bytes);
  for (size_t i = 0; i < ds.size(); ++i) s.insert(insert_vector(ds, i));
  return s;
}

}  // namespace storm
