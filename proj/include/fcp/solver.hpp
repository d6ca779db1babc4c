#pragma once

/// @file
/// First-order method that returns an approximate S3ONC point of
///   min_beta f(beta) + sum_j P_lambda(|beta_j|)
/// for an MCP penalty with a < 1/M, plus the certificate checker.
///
/// Each iteration either repairs one coordinate sitting in the exclusion zone
/// (0, a*lambda) by a trust-region step of radius gamma (closed form over three
/// candidates), or, when no coordinate is in the zone, takes a simultaneous
/// step: prox of lambda|.| on zero coordinates, a plain gradient step on the
/// others. It stops at the first zone-free iterate whose step is shorter than
/// gamma.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fcp/errors.hpp"
#include "fcp/losses.hpp"
#include "fcp/penalty.hpp"

namespace fcp {

class SolverConfig {
public:
  /// max_iter == 0 selects ten times the worst-case iteration bound computed
  /// from the initial objective with the loss lower bound 0.
  SolverConfig(double gamma_hat, double alpha_hat, double lipschitz,
               std::size_t max_iter = 0)
      : gamma_hat_(gamma_hat), alpha_hat_(alpha_hat), M_(lipschitz),
        max_iter_(max_iter) {
    if (!(gamma_hat > 0.0))
      throw std::invalid_argument("solver: gamma_hat must be positive");
    if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
      throw std::invalid_argument("solver: M must be positive and finite");
    if (!(alpha_hat > 0.0) || !(alpha_hat < 2.0 / lipschitz))
      throw std::invalid_argument("solver: alpha_hat must lie in (0, 2/M)");
    gamma_ = std::min(gamma_hat / (2.0 * M_), alpha_hat * gamma_hat);
  }

  double gamma_hat() const noexcept { return gamma_hat_; }
  double alpha_hat() const noexcept { return alpha_hat_; }
  double lipschitz() const noexcept { return M_; }
  /// Trust radius min{gamma_hat/(2M), alpha_hat*gamma_hat}.
  double gamma() const noexcept { return gamma_; }
  std::size_t max_iter() const noexcept { return max_iter_; }
  /// Residual guaranteed at a criteria_met termination: max{2M gamma, gamma/alpha_hat}.
  double certified_tolerance() const noexcept {
    return std::max(2.0 * M_ * gamma_, gamma_ / alpha_hat_);
  }

private:
  double gamma_hat_;
  double alpha_hat_;
  double M_;
  std::size_t max_iter_;
  double gamma_;
};

struct S3oncCertificate {
  double first_order_residual = std::numeric_limits<double>::infinity();
  bool exclusion_zone_ok = false;
  double tolerance = 0.0;

  bool passes() const noexcept {
    return exclusion_zone_ok && first_order_residual <= tolerance;
  }
};

enum class Termination { criteria_met, max_iter, numerical_failure };

inline const char *to_string(Termination t) noexcept {
  switch (t) {
  case Termination::criteria_met: return "criteria_met";
  case Termination::max_iter: return "max_iter";
  case Termination::numerical_failure: return "numerical_failure";
  }
  return "?";
}

struct SolverResult {
  Eigen::VectorXd beta;
  std::size_t iterations = 0;
  std::vector<double> objective_trace; ///< iterations + 1 entries
  Termination terminated_by = Termination::max_iter;
  S3oncCertificate certificate;
  Eigen::VectorXd best_beta;
  double suboptimality_witness = 0.0; ///< objective at best_beta
  std::size_t case1_steps = 0;
  std::size_t case2_steps = 0;
  std::size_t cycle_breaks = 0; ///< Case-1 two-cycles resolved by a zone exit
  std::string failure;
};

template <LossModel Loss>
double penalized_objective(const Loss &loss, const Eigen::VectorXd &beta,
                           const PenaltyParams &params) {
  return loss.value(beta) + mcp_sum(beta, params);
}

/// ceil((L(beta0) - lower) / (min{1/(2a) - M/2, M/2, 1/alpha_hat - M/2} gamma^2)) + 1.
inline double worst_case_iteration_bound(double initial_objective, double lower_bound,
                                       const PenaltyParams &params,
                                       const SolverConfig &cfg) {
  const double M = cfg.lipschitz();
  const double c = std::min({1.0 / (2.0 * params.a()) - 0.5 * M, 0.5 * M,
                             1.0 / cfg.alpha_hat() - 0.5 * M});
  if (!(c > 0.0))
    throw std::invalid_argument("iteration bound: requires a < 1/M and alpha_hat < 2/M");
  const double g = cfg.gamma();
  return std::ceil((initial_objective - lower_bound) / (c * g * g)) + 1.0;
}

/// Minimizes grad_i*b + P_lambda(|b|) over |b - beta_i| <= gamma. The objective
/// is concave on either side of 0, so the minimizer is an endpoint or 0.
/// Ties prefer 0, then the smaller magnitude.
inline double case1_step(const Eigen::VectorXd &beta, const Eigen::VectorXd &grad,
                         Eigen::Index iota, const PenaltyParams &params, double gamma) {
  const double b = beta[iota];
  const double g = grad[iota];
  std::array<double, 3> cand{b - gamma, b + gamma, 0.0};
  const std::size_t count = std::abs(b) <= gamma ? 3 : 2;

  double best = cand[0];
  double best_val = g * best + mcp_value(best, params);
  auto better = [](double v, double x, double best_v, double best_x) {
    if (v != best_v)
      return v < best_v;
    if (best_x == 0.0)
      return false;
    if (x == 0.0)
      return true;
    return std::abs(x) < std::abs(best_x);
  };
  for (std::size_t k = 1; k < count; ++k) {
    const double v = g * cand[k] + mcp_value(cand[k], params);
    if (better(v, cand[k], best_val, best)) {
      best = cand[k];
      best_val = v;
    }
  }
  return best;
}

namespace detail {

/// Step d with beta_next = beta + d for the simultaneous update.
inline void case2_direction(const Eigen::VectorXd &beta, const Eigen::VectorXd &grad,
                            double alpha_hat, const PenaltyParams &params,
                            Eigen::VectorXd &d) {
  d.resize(beta.size());
  const double lambda = params.lambda();
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double b = beta[j];
    if (b == 0.0) {
      const double m = std::abs(grad[j]) - lambda;
      d[j] = m > 0.0 ? alpha_hat * m * sign(-grad[j]) : 0.0;
    } else if (std::abs(b) >= params.knot()) {
      d[j] = -alpha_hat * grad[j];
    } else {
      throw logic_violation("case2_step: coordinate " + std::to_string(j) +
                            " lies in the exclusion zone");
    }
  }
}

inline std::optional<Eigen::Index> first_in_zone(const Eigen::VectorXd &beta,
                                                 const PenaltyParams &params) {
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (params.in_exclusion_zone(beta[j]))
      return j;
  return std::nullopt;
}

} // namespace detail

/// Zero coordinates get alpha_hat*[|g_j| - lambda]_+ * sign(-g_j); coordinates
/// with |beta_j| >= a*lambda get a gradient step. Requires no coordinate in
/// the exclusion zone.
inline Eigen::VectorXd case2_step(const Eigen::VectorXd &beta, const Eigen::VectorXd &grad,
                                  const SolverConfig &cfg, const PenaltyParams &params) {
  Eigen::VectorXd d;
  detail::case2_direction(beta, grad, cfg.alpha_hat(), params, d);
  return beta + d;
}

/// Minimal-norm first-order residual and exclusion-zone test at beta, given
/// the loss gradient there.
inline S3oncCertificate s3onc_certificate(const Eigen::VectorXd &beta,
                                          const Eigen::VectorXd &grad,
                                          const PenaltyParams &params, double tol) {
  S3oncCertificate cert;
  cert.tolerance = tol;
  cert.exclusion_zone_ok = exclusion_zone_clear(beta, params);
  const Interval sub = mcp_subdifferential_at_zero(params);
  double sq = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    double r;
    if (beta[j] == 0.0) {
      const double v = grad[j] + h1_derivative(0.0, params);
      r = v + sub.clamp(-v);
    } else {
      r = grad[j] + mcp_derivative(beta[j], params);
    }
    sq += r * r;
  }
  cert.first_order_residual = std::sqrt(sq);
  return cert;
}

template <LossModel Loss>
S3oncCertificate check_s3onc(const Eigen::VectorXd &beta, const Loss &loss,
                             const PenaltyParams &params, double tol) {
  detail::check_dim(beta.size(), loss.dimension(), "check_s3onc");
  const Eigen::VectorXd g = loss.gradient(beta);
  if (!g.allFinite()) {
    S3oncCertificate cert;
    cert.tolerance = tol;
    cert.exclusion_zone_ok = exclusion_zone_clear(beta, params);
    return cert;
  }
  return s3onc_certificate(beta, g, params, tol);
}

struct NoObserver {
  void operator()(std::size_t, const Eigen::VectorXd &, double) const noexcept {}
};

/// `observe(k, beta_k, objective_k)` is called for every accepted iterate,
/// including beta0.
template <LossModel Loss, class Observer = NoObserver>
SolverResult run(const Loss &loss, const PenaltyParams &params, const SolverConfig &cfg,
                 const Eigen::VectorXd &beta0, Observer &&observe = {}) {
  detail::check_dim(beta0.size(), loss.dimension(), "solver(beta0)");
  if (!beta0.allFinite())
    throw std::invalid_argument("solver: beta0 must be finite");
  const double M = cfg.lipschitz();
  if (!(params.a() < 1.0 / M))
    throw std::invalid_argument("solver: penalty a must be below 1/M");

  SolverResult res;
  Eigen::VectorXd beta = beta0, grad(beta0.size()), d(beta0.size());

  auto evaluate = [&](std::size_t k) -> std::optional<double> {
    const double f = loss.value_and_gradient(beta, grad);
    const double obj = f + mcp_sum(beta, params);
    if (!std::isfinite(obj) || !grad.allFinite()) {
      res.failure = "non-finite loss or gradient at iteration " + std::to_string(k);
      return std::nullopt;
    }
    return obj;
  };

  auto obj0 = evaluate(0);
  if (!obj0)
    throw numerical_failure("solver: non-finite objective at beta0", 0);
  res.objective_trace.push_back(*obj0);
  observe(0, beta, *obj0);
  res.best_beta = beta;
  res.suboptimality_witness = *obj0;

  std::size_t max_iter = cfg.max_iter();
  if (max_iter == 0) {
    const double bound = 10.0 * worst_case_iteration_bound(std::max(*obj0, 0.0), 0.0, params, cfg);
    max_iter = bound < 1e15 ? static_cast<std::size_t>(bound) : static_cast<std::size_t>(1e15);
  }

  const double gamma = cfg.gamma();
  Eigen::VectorXd prev(beta.size()), probe;
  // Case-1 bookkeeping for two-cycle detection: the coordinate moved by the
  // previous iteration (if it was a Case-1 step) and its value before that.
  std::optional<Eigen::Index> last_iota;
  double last_from = 0.0;
  for (std::size_t k = 0;; ++k) {
    const auto iota = detail::first_in_zone(beta, params);
    if (!iota) {
      detail::case2_direction(beta, grad, cfg.alpha_hat(), params, d);
      if (d.norm() < gamma) {
        res.terminated_by = Termination::criteria_met;
        break;
      }
    }
    if (k >= max_iter) {
      res.terminated_by = Termination::max_iter;
      break;
    }
    prev = beta;
    if (iota) {
      const Eigen::Index j = *iota;
      double next = case1_step(beta, grad, j, params, gamma);
      if (last_iota == j && std::abs(next - last_from) <= 1e-9 * gamma) {
        // Undoing the previous step restores the previous state (up to
        // rounding), so the unmodified iteration would repeat forever. This
        // needs a gradient that is not M-Lipschitz locally (e.g. a ReLU kink).
        // Leave the zone instead, to whichever boundary has the lower objective.
        const double edge = sign(beta[j]) * params.knot();
        probe = beta;
        probe[j] = 0.0;
        const double at_zero = penalized_objective(loss, probe, params);
        probe[j] = edge;
        const double at_edge = penalized_objective(loss, probe, params);
        next = at_edge < at_zero ? edge : 0.0;
        ++res.cycle_breaks;
      }
      last_iota = j;
      last_from = beta[j];
      beta[j] = next;
      ++res.case1_steps;
    } else {
      last_iota.reset();
      beta += d;
      ++res.case2_steps;
    }
    const auto obj = evaluate(k + 1);
    if (!obj) {
      res.terminated_by = Termination::numerical_failure;
      beta = prev;
      break;
    }
    res.objective_trace.push_back(*obj);
    observe(k + 1, beta, *obj);
    if (*obj < res.suboptimality_witness) {
      res.suboptimality_witness = *obj;
      res.best_beta = beta;
    }
  }

  res.iterations = res.objective_trace.size() - 1;
  res.beta = beta;
  if (res.terminated_by == Termination::numerical_failure) {
    res.certificate = check_s3onc(beta, loss, params, cfg.certified_tolerance());
  } else {
    res.certificate = s3onc_certificate(beta, grad, params, cfg.certified_tolerance());
  }
  return res;
}

} // namespace fcp
