#include "storm/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "storm/rng.hpp"
#include "storm/surrogate.hpp"

namespace storm {

namespace {

using Clock = std::chrono::steady_clock;

double mse_of(const Dataset& ds, std::span<const double> theta) {
  double sq = 0.0;
  for (size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.x(i);
    double pred = 0.0;
    for (size_t j = 0; j < x.size(); ++j) pred += theta[j] * x[j];
    const double r = pred - ds.y(i);
    sq += r * r;
  }
  return sq / ds.size();
}

double relative_error(std::span<const double> theta, std::span<const double> reference) {
  double diff = 0.0, ref = 0.0;
  for (size_t i = 0; i < theta.size(); ++i) {
    const double d = theta[i] - reference[i];
    diff += d * d;
    ref += reference[i] * reference[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
}

}  // namespace

std::vector<ExperimentResult> run_sweep(const Dataset& ds, const SweepConfig& cfg) {
  if (!ds.norm.normalized) throw InputError("run_sweep: dataset must be normalized");
  if (ds.task != TaskKind::kRegression) {
    throw InputError("run_sweep: the memory sweep compares regression methods");
  }
  if (cfg.budgets.empty() || cfg.seeds.empty() || cfg.methods.empty()) {
    throw InputError("run_sweep: budgets, methods, and seeds must be non-empty");
  }

  const auto ols = ols_solve(ds);
  const uint32_t buckets = 1u << cfg.p;

  std::vector<ExperimentResult> results;
  results.reserve(cfg.methods.size() * cfg.budgets.size() * cfg.seeds.size());

  for (const auto& method : cfg.methods) {
    for (const uint64_t budget_bytes : cfg.budgets) {
      const MemoryBudget budget{budget_bytes};
      for (const uint64_t seed : cfg.seeds) {
        ExperimentResult cell;
        cell.method = method;
        cell.budget_bytes = budget_bytes;
        cell.seed = seed;
        const auto start = Clock::now();
        try {
          std::vector<double> theta;
          if (method == "storm") {
            const uint64_t rows = budget.storm_rows(buckets);
            if (rows < 1) throw CapacityError("budget below one sketch row");
            const auto sketch = build_sketch(ds, SketchFamily::kPrpRegression, cfg.p,
                                             static_cast<uint32_t>(rows), seed);
            OptimizerConfig opt = cfg.optimizer;
            opt.seed = seed;
            theta = dfo_train(sketch, opt).theta();
            cell.used_bytes = sketch.memory_footprint_bytes();
          } else if (method == "reservoir") {
            const auto res = reservoir_sample_train(ds, budget, seed);
            theta = res.solution.theta;
            cell.used_bytes = 4ull * (ds.dim + 1) * res.retained;
          } else if (method == "cw") {
            const uint64_t rows = budget.row_capacity(ds.dim);
            if (rows < ds.dim + 1) throw CapacityError("budget below d+1 sketch rows");
            theta = cw_sketch_train(ds, rows, seed).solution.theta;
            cell.used_bytes = 4ull * (ds.dim + 1) * rows;
          } else {
            throw InputError("run_sweep: unknown method \"" + method + "\"");
          }
          cell.mse = mse_of(ds, theta);
          cell.param_err = relative_error(theta, ols.theta);
        } catch (const CapacityError& e) {
          cell.skipped = true;
          cell.skip_reason = e.what();
        }
        cell.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        results.push_back(std::move(cell));
      }
    }
  }

  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.method, a.budget_bytes, a.seed) <
           std::tie(b.method, b.budget_bytes, b.seed);
  });
  return results;
}

void write_results_csv(std::span<const ExperimentResult> results,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "method,budget_bytes,seed,skipped,used_bytes,mse,param_err,seconds,skip_reason\n";
  for (const auto& r : results) {
    out << r.method << ',' << r.budget_bytes << ',' << r.seed << ',' << (r.skipped ? 1 : 0)
        << ',' << r.used_bytes << ',' << r.mse << ',' << r.param_err << ',' << r.seconds
        << ',' << r.skip_reason << '\n';
  }
}

void write_results_json(std::span<const ExperimentResult> results,
                        const std::filesystem::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"method", r.method},
                   {"budget_bytes", r.budget_bytes},
                   {"seed", r.seed},
                   {"skipped", r.skipped},
                   {"skip_reason", r.skip_reason},
                   {"used_bytes", r.used_bytes},
                   {"mse", r.mse},
                   {"param_err", r.param_err},
                   {"seconds", r.seconds}});
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << arr.dump(2) << '\n';
}

EdgeMergeReport simulate_edge_merge(const Dataset& ds, const EdgeMergeParams& params) {
  if (params.shards < 2) throw InputError("simulate_edge_merge: need at least 2 shards");
  if (ds.size() < params.shards) {
    throw InputError("simulate_edge_merge: fewer points than shards");
  }

  const auto reference =
      build_sketch(ds, params.family, params.p, params.rows, params.seed);

  // Contiguous shard ranges stand in for per-device streams.
  HashFamilyConfig config{params.family, params.p, sketch_dim(ds), params.seed};
  std::vector<Sketch> shards;
  shards.reserve(params.shards);
  const size_t per = ds.size() / params.shards;
  size_t next = 0;
  for (size_t s = 0; s < params.shards; ++s) {
    const size_t end = (s + 1 == params.shards) ? ds.size() : next + per;
    Sketch shard(config, params.rows);
    for (size_t i = next; i < end; ++i) shard.insert(insert_vector(ds, i));
    shards.push_back(std::move(shard));
    next = end;
  }

  // Merge pairwise along a random tree: any order must give the same bytes.
  auto eng = make_engine(mix_seed(params.seed, 0x4d524745ull));
  while (shards.size() > 1) {
    const size_t a = eng() % shards.size();
    size_t b = eng() % (shards.size() - 1);
    if (b >= a) ++b;
    shards[a].add(shards[b]);
    shards.erase(shards.begin() + static_cast<ptrdiff_t>(b));
  }
  const Sketch& merged = shards.front();

  EdgeMergeReport report;
  report.shards = params.shards;
  report.points = ds.size();
  report.sketch_bytes = merged.memory_footprint_bytes();
  report.transmitted_bytes = (params.shards - 1) * report.sketch_bytes;
  report.raw_bytes = ds.size() * (ds.dim + 1) * sizeof(double);
  report.sketch_bit_equal = merged.serialize() == reference.serialize();

  if (params.family != SketchFamily::kComposed) {
    const auto merged_fit = dfo_train(merged, params.optimizer);
    const auto reference_fit = dfo_train(reference, params.optimizer);
    report.theta_bit_equal = merged_fit.theta_tilde == reference_fit.theta_tilde;
    report.theta = merged_fit.theta();
  } else {
    report.theta_bit_equal = report.sketch_bit_equal;
  }
  return report;
}

}  // namespace storm
