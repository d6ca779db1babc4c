#pragma once

/// @file
/// Minimax concave penalty (MCP) and the pieces of it the solvers need:
/// closed-form value, derivatives with explicit kink reporting, the
/// concave/convex split h1 + lambda*|.|, and soft-thresholding.

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "fcp/errors.hpp"

namespace fcp {

/// The MCP pair (lambda, a). The knot, beyond which the penalty is flat, sits
/// at a*lambda.
class PenaltyParams {
public:
  PenaltyParams(double lambda, double a) : lambda_(lambda), a_(a) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("penalty: lambda must be positive");
    if (!(a > 0.0) || !std::isfinite(a))
      throw std::invalid_argument("penalty: a must be positive");
  }

  double lambda() const noexcept { return lambda_; }
  double a() const noexcept { return a_; }
  double knot() const noexcept { return a_ * lambda_; }
  /// Saturated value a*lambda^2/2.
  double cap() const noexcept { return 0.5 * a_ * lambda_ * lambda_; }

  /// |theta| in the open interval (0, a*lambda).
  bool in_exclusion_zone(double theta) const noexcept {
    const double m = std::abs(theta);
    return m > 0.0 && m < knot();
  }

private:
  double lambda_;
  double a_;
};

struct Interval {
  double lo;
  double hi;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  double clamp(double x) const noexcept {
    return x < lo ? lo : (x > hi ? hi : x);
  }
};

inline double sign(double x) noexcept {
  return static_cast<double>((x > 0.0) - (x < 0.0));
}

/// P_lambda(|theta|) = lambda|theta| - theta^2/(2a) inside the knot,
/// a*lambda^2/2 outside.
inline double mcp_value(double theta, const PenaltyParams &params) noexcept {
  const double t = std::abs(theta);
  if (t <= params.knot())
    return params.lambda() * t - t * t / (2.0 * params.a());
  return params.cap();
}

/// sign(theta)*[a*lambda - |theta|]_+/a. Throws kink_error at theta == 0.
inline double mcp_derivative(double theta, const PenaltyParams &params) {
  if (theta == 0.0)
    throw kink_error("mcp_derivative: kink at 0; use the subdifferential "
                     "interval [-lambda, lambda]");
  const double slack = params.knot() - std::abs(theta);
  return slack > 0.0 ? sign(theta) * slack / params.a() : 0.0;
}

inline Interval mcp_subdifferential_at_zero(const PenaltyParams &params) noexcept {
  return {-params.lambda(), params.lambda()};
}

/// -1/a inside (0, a*lambda), 0 beyond the knot, empty at theta == 0 and at
/// |theta| == a*lambda.
inline std::optional<double> mcp_second_derivative(double theta,
                                                   const PenaltyParams &params) noexcept {
  const double t = std::abs(theta);
  if (t == 0.0 || t == params.knot())
    return std::nullopt;
  return t < params.knot() ? -1.0 / params.a() : 0.0;
}

/// Concave part of the split P_lambda(|theta|) = h1(theta) + lambda|theta|.
inline double h1_value(double theta, const PenaltyParams &params) noexcept {
  const double t = std::abs(theta);
  if (t < params.knot())
    return -theta * theta / (2.0 * params.a());
  return params.cap() - params.lambda() * t;
}

/// h1 is differentiable everywhere with a (1/a)-Lipschitz derivative.
inline double h1_derivative(double theta, const PenaltyParams &params) noexcept {
  if (std::abs(theta) < params.knot())
    return -theta / params.a();
  return -params.lambda() * sign(theta);
}

inline double soft_threshold(double x, double t) {
  if (t < 0.0)
    throw std::invalid_argument("soft_threshold: negative threshold");
  const double m = std::abs(x) - t;
  return m > 0.0 ? sign(x) * m : 0.0;
}

inline double mcp_sum(const Eigen::Ref<const Eigen::VectorXd> &beta,
                      const PenaltyParams &params) noexcept {
  double s = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    s += mcp_value(beta[j], params);
  return s;
}

inline bool exclusion_zone_clear(const Eigen::Ref<const Eigen::VectorXd> &beta,
                                 const PenaltyParams &params) noexcept {
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (params.in_exclusion_zone(beta[j]))
      return false;
  return true;
}

} // namespace fcp
