#pragma once

/// @file
/// Synthetic regression experiment for an MCP-regularized ReLU network
/// trained with the S3ONC solver: polynomial target on [0,1]^d plus Gaussian
/// noise, Gaussian weight initialization, and a sweep that relates the
/// training objective reached to test error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fcp/dataset.hpp"
#include "fcp/mlp.hpp"
#include "fcp/parallel.hpp"
#include "fcp/penalty.hpp"
#include "fcp/rng.hpp"
#include "fcp/solver.hpp"
#include "fcp/stats.hpp"

namespace fcp {

struct Monomial {
  double coef = 0.0;
  std::vector<int> exponents; ///< one per input coordinate
};

/// g(x) = sum_k coef_k * prod_j x_j^{e_kj}.
struct PolynomialTarget {
  std::vector<Monomial> terms;

  double operator()(const Eigen::Ref<const Eigen::VectorXd> &x) const {
    double s = 0.0;
    for (const auto &m : terms) {
      double t = m.coef;
      for (std::size_t j = 0; j < m.exponents.size(); ++j)
        if (m.exponents[j] != 0)
          t *= std::pow(x[static_cast<Eigen::Index>(j)], m.exponents[j]);
      s += t;
    }
    return s;
  }

  /// 1 + 2 x1 - 3 x2 x3 + 1.5 x4^2 (padded with zero exponents for d > 4).
  static PolynomialTarget default_for(int d) {
    auto e = [d](std::initializer_list<int> head) {
      std::vector<int> v(static_cast<std::size_t>(d), 0);
      std::size_t j = 0;
      for (int x : head)
        if (j < v.size())
          v[j++] = x;
      return v;
    };
    PolynomialTarget g;
    g.terms = {{1.0, e({})}, {2.0, e({1})}, {-3.0, e({0, 1, 1})}, {1.5, e({0, 0, 0, 2})}};
    return g;
  }
};

struct NNExperimentConfig {
  MLPArchitecture arch{{4, 16, 16, 1}};
  Eigen::Index n_train = 60;
  Eigen::Index n_test = 1000;
  double noise_sd = 0.1;
  PolynomialTarget target = PolynomialTarget::default_for(4);
  double init_sd = 0.1;
  double lambda = 0.02;
  double a_scale = 0.5;         ///< a = a_scale / M
  double gamma_hat = 1e-2;
  double alpha_hat_scale = 1.0; ///< alpha_hat = alpha_hat_scale / M
  std::size_t max_iter = 400000;
  LipschitzEstimateConfig lipschitz{};
  std::uint64_t seed = 7;

  int d() const noexcept { return arch.input_size(); }

  void validate() const {
    if (n_train <= 0 || n_test <= 0)
      throw std::invalid_argument("nn: sample sizes must be positive");
    if (!(noise_sd >= 0.0) || !(init_sd >= 0.0))
      throw std::invalid_argument("nn: standard deviations must be >= 0");
    if (!(lambda > 0.0))
      throw std::invalid_argument("nn: lambda must be positive");
    if (!(a_scale > 0.0 && a_scale < 1.0))
      throw std::invalid_argument("nn: a_scale must lie in (0, 1)");
    if (!(alpha_hat_scale > 0.0 && alpha_hat_scale < 2.0))
      throw std::invalid_argument("nn: alpha_hat_scale must lie in (0, 2)");
    for (const auto &m : target.terms)
      if (m.exponents.size() != static_cast<std::size_t>(d()))
        throw std::invalid_argument("nn: target exponents must match input size");
  }
};

namespace detail {

enum class NnStream : std::uint64_t { data = 1, lipschitz = 2, init = 3 };

inline Rng nn_stream(const NNExperimentConfig &cfg, int replication, NnStream s) {
  return make_stream(cfg.seed, {static_cast<std::uint64_t>(replication),
                                static_cast<std::uint64_t>(s)});
}

inline DatasetPtr sample_regression(const NNExperimentConfig &cfg, Eigen::Index n, Rng &rng,
                                    std::uint64_t tag) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd X(n, cfg.d());
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < cfg.d(); ++j)
      X(i, j) = unif(rng);
    y[i] = cfg.target(X.row(i).transpose());
    if (cfg.noise_sd > 0.0)
      y[i] += cfg.noise_sd * noise(rng);
  }
  return make_dataset(std::move(X), std::move(y), DataKind::regression, tag);
}

} // namespace detail

struct TrainTestRegression {
  DatasetPtr train;
  DatasetPtr test;
};

/// x uniform on [0,1]^d, y = g(x) + w with w ~ N(0, noise_sd^2).
inline TrainTestRegression generate_regression_data(const NNExperimentConfig &cfg,
                                                    int replication = 0) {
  cfg.validate();
  Rng rng = detail::nn_stream(cfg, replication, detail::NnStream::data);
  const std::uint64_t tag = stream_seed(cfg.seed, {static_cast<std::uint64_t>(replication)});
  TrainTestRegression tt;
  tt.train = detail::sample_regression(cfg, cfg.n_train, rng, tag);
  tt.test = detail::sample_regression(cfg, cfg.n_test, rng, tag);
  return tt;
}

inline double mlp_mse(const MLPArchitecture &arch, const Eigen::VectorXd &beta,
                      const Dataset &data) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double r = data.y()[i] - mlp_forward(arch, beta, data.X().row(i).transpose());
    s += r * r;
  }
  return s / static_cast<double>(data.n());
}

/// Everything a training run needs, derived deterministically from the
/// configuration and replication index.
struct NnProblem {
  TrainTestRegression data;
  MlpSquaredLoss loss;
  PenaltyParams penalty;
  SolverConfig solver;
  Eigen::VectorXd beta0;
};

inline NnProblem make_nn_problem(const NNExperimentConfig &cfg, int replication = 0) {
  auto tt = generate_regression_data(cfg, replication);
  Rng lrng = detail::nn_stream(cfg, replication, detail::NnStream::lipschitz);
  const double M = estimate_mlp_lipschitz(cfg.arch, tt.train, cfg.lipschitz, lrng);
  MlpSquaredLoss loss(cfg.arch, tt.train, M);
  PenaltyParams pen(cfg.lambda, cfg.a_scale / M);
  SolverConfig scfg(cfg.gamma_hat, cfg.alpha_hat_scale / M, M, cfg.max_iter);

  Rng irng = detail::nn_stream(cfg, replication, detail::NnStream::init);
  std::normal_distribution<double> init(0.0, cfg.init_sd);
  Eigen::VectorXd beta0(cfg.arch.parameter_count());
  for (Eigen::Index j = 0; j < beta0.size(); ++j)
    beta0[j] = cfg.init_sd > 0.0 ? init(irng) : 0.0;
  return {std::move(tt), std::move(loss), pen, scfg, std::move(beta0)};
}

struct NnTrainResult {
  SolverResult solver;
  double lipschitz = 0.0;
  double a = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

inline NnTrainResult train_fcp_nn(const NNExperimentConfig &cfg, int replication = 0) {
  NnProblem prob = make_nn_problem(cfg, replication);
  NnTrainResult out;
  out.solver = run(prob.loss, prob.penalty, prob.solver, prob.beta0);
  out.lipschitz = prob.solver.lipschitz();
  out.a = prob.penalty.a();
  out.train_mse = mlp_mse(cfg.arch, out.solver.beta, *prob.data.train);
  out.test_mse = mlp_mse(cfg.arch, out.solver.beta, *prob.data.test);
  return out;
}

struct SweepPoint {
  double stop_objective = 0.0;
  bool reached = false;
  std::size_t iteration = 0;
  double objective = 0.0; ///< penalized objective of the snapshot
  double test_mse = 0.0;
};

/// Runs one trajectory and snapshots the first iterate whose penalized
/// objective is <= each stop level. Levels must be strictly decreasing.
inline std::vector<SweepPoint>
suboptimality_vs_generalization_sweep(const NNExperimentConfig &cfg,
                                      const std::vector<double> &stop_objectives,
                                      int replication = 0) {
  for (std::size_t i = 1; i < stop_objectives.size(); ++i)
    if (!(stop_objectives[i] < stop_objectives[i - 1]))
      throw std::invalid_argument("sweep: stop objectives must be strictly decreasing");
  NnProblem prob = make_nn_problem(cfg, replication);
  std::vector<SweepPoint> pts(stop_objectives.size());
  std::size_t next = 0;
  auto observe = [&](std::size_t k, const Eigen::VectorXd &beta, double obj) {
    while (next < pts.size() && obj <= stop_objectives[next]) {
      auto &pt = pts[next];
      pt.stop_objective = stop_objectives[next];
      pt.reached = true;
      pt.iteration = k;
      pt.objective = obj;
      pt.test_mse = mlp_mse(cfg.arch, beta, *prob.data.test);
      ++next;
    }
  };
  run(prob.loss, prob.penalty, prob.solver, prob.beta0, observe);
  for (std::size_t i = next; i < pts.size(); ++i)
    pts[i].stop_objective = stop_objectives[i];
  return pts;
}

/// Levels end + r*(start - end) for r in `remaining`, typically a decreasing
/// list ending at 0 so the last level is the terminal objective.
inline std::vector<double> stop_levels(double start, double end,
                                       const std::vector<double> &remaining = {0.5, 0.25, 0.1,
                                                                               0.03, 0.01, 0.0}) {
  std::vector<double> lv;
  for (double r : remaining)
    lv.push_back(end + r * (start - end));
  return lv;
}

/// Per-replication outcome of the consistency study.
struct TrendReplication {
  int replication = 0;
  NnTrainResult fit;
  std::vector<SweepPoint> sweep;
  bool exclusion_ok = false;
  std::string failure; ///< non-empty when the replication threw
  bool ok() const noexcept {
    return failure.empty() && fit.solver.terminated_by == Termination::criteria_met;
  }
};

struct TrendLevel {
  double median_objective = 0.0;
  double median_test_mse = 0.0;
  std::size_t reached = 0;
};

struct TrendReport {
  std::vector<TrendReplication> replications;
  std::vector<TrendLevel> levels;
  double spearman = 0.0;
  std::size_t exclusion_ok = 0;
};

/// Trains each replication to termination, then replays the same trajectory
/// and snapshots it at `stop_levels(initial, terminal, remaining)`. Medians
/// are taken per level over replications that reached it.
inline TrendReport consistency_trend(const NNExperimentConfig &cfg, int replications,
                                     unsigned threads = 1,
                                     const std::vector<double> &remaining = {0.5, 0.25, 0.1,
                                                                             0.03, 0.01, 0.0}) {
  if (replications <= 0)
    throw std::invalid_argument("trend: replications must be positive");
  TrendReport rep;
  rep.replications.resize(static_cast<std::size_t>(replications));
  parallel_for(rep.replications.size(), threads, [&](std::size_t i) {
    auto &r = rep.replications[i];
    r.replication = static_cast<int>(i);
    r.sweep.resize(remaining.size());
    try {
      r.fit = train_fcp_nn(cfg, r.replication);
      const auto &tr = r.fit.solver.objective_trace;
      r.sweep = suboptimality_vs_generalization_sweep(
          cfg, stop_levels(tr.front(), tr.back(), remaining), r.replication);
      PenaltyParams pen(cfg.lambda, r.fit.a);
      r.exclusion_ok = exclusion_zone_clear(r.fit.solver.beta, pen);
    } catch (const std::exception &e) {
      r.failure = e.what();
    }
  });
  std::vector<double> objs, mses;
  for (std::size_t l = 0; l < remaining.size(); ++l) {
    std::vector<double> o, m;
    for (const auto &r : rep.replications)
      if (r.sweep[l].reached) {
        o.push_back(r.sweep[l].objective);
        m.push_back(r.sweep[l].test_mse);
      }
    TrendLevel lv;
    lv.reached = o.size();
    if (!o.empty()) {
      lv.median_objective = median(o);
      lv.median_test_mse = median(m);
      objs.push_back(lv.median_objective);
      mses.push_back(lv.median_test_mse);
    }
    rep.levels.push_back(lv);
  }
  rep.spearman = objs.size() >= 2 ? spearman(objs, mses) : 0.0;
  for (const auto &r : rep.replications)
    rep.exclusion_ok += r.exclusion_ok ? 1 : 0;
  return rep;
}

} // namespace fcp
