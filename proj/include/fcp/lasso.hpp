#pragma once

/// @file
/// Proximal gradient (ISTA, fixed step) for min_beta f(beta) + lambda*|beta|_1.
/// Used to warm-start the S3ONC solver.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fcp/errors.hpp"
#include "fcp/losses.hpp"
#include "fcp/penalty.hpp"

namespace fcp {

struct LassoConfig {
  double step = 0.0; ///< 0 selects 1/M
  double tol = 1e-7;
  std::size_t max_iter = 100000;
  bool keep_trace = false;
};

struct LassoResult {
  Eigen::VectorXd beta;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0; ///< ||beta - prox(beta - step*grad)||_inf at beta
  double objective = 0.0;
  std::vector<double> objective_trace; ///< filled when keep_trace is set
};

inline double l1_objective(double loss_value, const Eigen::VectorXd &beta,
                           double lambda) noexcept {
  return loss_value + lambda * beta.lpNorm<1>();
}

/// The loss is assumed convex; this is the caller's responsibility.
template <LossModel Loss>
LassoResult solve_lasso(const Loss &loss, double lambda, const LassoConfig &cfg,
                        const Eigen::VectorXd &beta0) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("solve_lasso: lambda must be positive");
  if (!(cfg.tol > 0.0))
    throw std::invalid_argument("solve_lasso: tol must be positive");
  detail::check_dim(beta0.size(), loss.dimension(), "solve_lasso(beta0)");
  const double M = loss.lipschitz_bound();
  double step = cfg.step > 0.0 ? cfg.step : 1.0 / M;
  if (step > 1.0 / M * (1.0 + 1e-12))
    throw std::invalid_argument("solve_lasso: step must not exceed 1/M");

  LassoResult res;
  Eigen::VectorXd beta = beta0, grad(beta0.size()), next(beta0.size());
  const double thr = step * lambda;
  for (std::size_t k = 0;; ++k) {
    const double f = loss.value_and_gradient(beta, grad);
    if (!std::isfinite(f) || !grad.allFinite())
      throw numerical_failure("solve_lasso: non-finite loss or gradient", k);
    const double obj = l1_objective(f, beta, lambda);
    if (cfg.keep_trace)
      res.objective_trace.push_back(obj);
    for (Eigen::Index j = 0; j < beta.size(); ++j)
      next[j] = soft_threshold(beta[j] - step * grad[j], thr);
    const double resid = (beta - next).lpNorm<Eigen::Infinity>();
    if (resid <= cfg.tol || k >= cfg.max_iter) {
      res.beta = beta;
      res.converged = resid <= cfg.tol;
      res.iterations = k;
      res.residual = resid;
      res.objective = obj;
      return res;
    }
    beta.swap(next);
  }
}

} // namespace fcp
