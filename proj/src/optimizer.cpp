#include "storm/optimizer.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "storm/rng.hpp"

namespace storm {

namespace {

constexpr double kDivergenceNorm = 1e6;

double step_size(const OptimizerConfig& cfg, uint32_t iteration) {
  if (cfg.eta_decay == EtaDecay::kInverseSqrt) {
    return cfg.eta / std::sqrt(static_cast<double>(iteration));
  }
  return cfg.eta;
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_divergence(std::span<const double> theta_tilde) {
  if (norm_of(theta_tilde) > kDivergenceNorm || !std::isfinite(norm_of(theta_tilde))) {
    throw DivergenceError("training diverged: |theta~| exceeded 1e6");
  }
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

void OptimizerConfig::validate() const {
  if (queries < 2) throw InputError("optimizer: need k >= 2 sphere queries");
  if (sigma <= 0.0) throw InputError("optimizer: sigma must be positive");
  if (eta <= 0.0) throw InputError("optimizer: eta must be positive");
}

void project_constraint(std::vector<double>& theta_tilde) {
  if (theta_tilde.empty()) throw InputError("project_constraint: empty parameter");
  theta_tilde.back() = -1.0;
}

TrainTrace dfo_train(const Sketch& sketch, const OptimizerConfig& cfg) {
  cfg.validate();
  if (sketch.insert_count() == 0) throw EmptySketchError("dfo_train: empty sketch");
  if (sketch.config().family == SketchFamily::kComposed) {
    throw InputError("dfo_train: composed sketches have no training semantics");
  }
  const size_t dim = sketch.config().d_aug - 1;  // theta~ lives below the augmentation
  if (dim < 2) throw InputError("dfo_train: sketch dimension too small to train");

  auto eng = make_engine(mix_seed(cfg.seed, 0x44464f54ull));
  NormalSampler normal;
  const auto start = Clock::now();

  TrainTrace trace;
  trace.entries.reserve(cfg.iterations);
  std::vector<double> theta_tilde(dim, 0.0);
  project_constraint(theta_tilde);

  std::vector<double> point(dim);
  std::vector<double> grad(dim);
  std::vector<double> direction(dim);

  for (uint32_t n = 1; n <= cfg.iterations; ++n) {
    const double base = sketch.estimate_mean_loss(augment_query(theta_tilde)).value;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (uint32_t j = 0; j < cfg.queries; ++j) {
      double norm2 = 0.0;
      for (auto& u : direction) {
        u = normal(eng);
        norm2 += u * u;
      }
      const double inv = 1.0 / std::max(std::sqrt(norm2), 1e-300);
      for (size_t i = 0; i < dim; ++i) {
        direction[i] *= inv;
        point[i] = theta_tilde[i] + cfg.sigma * direction[i];
      }
      const double delta = sketch.estimate_mean_loss(augment_query(point)).value;
      const double w = (delta - base) * cfg.sigma;
      for (size_t i = 0; i < dim; ++i) grad[i] += w * direction[i];
    }
    const double scale = static_cast<double>(dim) /
                         (static_cast<double>(cfg.queries) * cfg.sigma * cfg.sigma);
    const double eta = step_size(cfg, n);
    for (size_t i = 0; i < dim; ++i) theta_tilde[i] -= eta * scale * grad[i];
    project_constraint(theta_tilde);
    check_divergence(theta_tilde);
    trace.entries.push_back({n, base, theta_tilde, seconds_since(start)});
  }
  trace.theta_tilde = std::move(theta_tilde);
  return trace;
}

TrainTrace exact_surrogate_train(const Dataset& ds, const surrogate::SurrogateParams& params,
                                 const OptimizerConfig& cfg) {
  cfg.validate();
  if (params.family != TaskKind::kRegression || ds.task != TaskKind::kRegression) {
    throw InputError("exact_surrogate_train: regression datasets only");
  }
  if (ds.size() == 0) throw InputError("exact_surrogate_train: empty dataset");
  const size_t d = ds.dim;
  const size_t dim = d + 1;
  const auto start = Clock::now();

  TrainTrace trace;
  trace.entries.reserve(cfg.iterations);
  std::vector<double> theta_tilde(dim, 0.0);
  project_constraint(theta_tilde);

  std::vector<double> grad(dim);
  const double inv_n = 1.0 / static_cast<double>(ds.size());

  for (uint32_t n = 1; n <= cfg.iterations; ++n) {
    const double norm = norm_of(theta_tilde);
    const double inv_norm = 1.0 / norm;
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (size_t i = 0; i < ds.size(); ++i) {
      const auto x = ds.x(i);
      // b_i = [x_i, y_i]; the augmentation coordinate meets a zero in the
      // query and drops out of every inner product.
      double dot = theta_tilde[d] * ds.y(i);
      for (size_t j = 0; j < d; ++j) dot += theta_tilde[j] * x[j];
      const double t = dot * inv_norm;
      loss += surrogate::prp_loss(t, params.p);
      const double slope = surrogate::prp_loss_slope(t, params.p) * inv_norm;
      for (size_t j = 0; j < d; ++j) {
        grad[j] += slope * (x[j] - t * theta_tilde[j] * inv_norm);
      }
      grad[d] += slope * (ds.y(i) - t * theta_tilde[d] * inv_norm);
    }
    const double eta = step_size(cfg, n);
    for (size_t j = 0; j < dim; ++j) theta_tilde[j] -= eta * inv_n * grad[j];
    project_constraint(theta_tilde);
    check_divergence(theta_tilde);
    trace.entries.push_back({n, loss * inv_n, theta_tilde, seconds_since(start)});
  }
  trace.theta_tilde = std::move(theta_tilde);
  return trace;
}

OlsSolution ols_solve_raw(std::span<const double> features, std::span<const double> targets,
                          size_t dim) {
  if (dim == 0 || targets.empty()) throw InputError("ols_solve: empty system");
  if (features.size() != targets.size() * dim) {
    throw InputError("ols_solve: feature/target size mismatch");
  }
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Matrix> x(features.data(), static_cast<Eigen::Index>(targets.size()),
                             static_cast<Eigen::Index>(dim));
  Eigen::Map<const Eigen::VectorXd> y(targets.data(), static_cast<Eigen::Index>(targets.size()));

  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd rhs = x.transpose() * y;

  auto try_solve = [&](double ridge) -> Eigen::VectorXd {
    Eigen::MatrixXd m = gram;
    if (ridge > 0.0) m.diagonal().array() += ridge;
    return m.ldlt().solve(rhs);
  };
  auto acceptable = [&](const Eigen::VectorXd& theta) {
    if (!theta.allFinite()) return false;
    const double denom = std::max(rhs.norm(), 1e-30);
    return (gram * theta - rhs).norm() <= 1e-6 * std::max(denom, theta.norm() * gram.norm());
  };

  OlsSolution out;
  Eigen::VectorXd theta = try_solve(0.0);
  if (!acceptable(theta)) {
    theta = try_solve(1e-8);
    out.used_ridge = true;
    if (!theta.allFinite()) {
      throw SingularityError("ols_solve: system singular beyond ridge rescue");
    }
  }
  out.theta.assign(theta.data(), theta.data() + theta.size());
  return out;
}

OlsSolution ols_solve(const Dataset& ds) {
  if (ds.size() == 0) throw InputError("ols_solve: empty dataset");
  return ols_solve_raw(ds.features, ds.targets, ds.dim);
}

std::string trace_to_json_lines(const TrainTrace& trace) {
  std::ostringstream out;
  for (const auto& e : trace.entries) {
    nlohmann::json line{{"iteration", e.iteration},
                        {"loss", e.loss},
                        {"theta_tilde", e.theta_tilde},
                        {"seconds", e.seconds}};
    out << line.dump() << '\n';
  }
  return out.str();
}

}  // namespace storm
