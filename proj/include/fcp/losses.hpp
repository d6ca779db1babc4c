#pragma once

/// @file
/// Smooth loss models consumed by the Lasso and S3ONC solvers. Every model
/// exposes its value, gradient and a gradient-Lipschitz bound M that holds
/// in the Euclidean norm (and therefore also coordinate-wise).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "fcp/dataset.hpp"
#include "fcp/errors.hpp"

namespace fcp {

template <class L>
concept LossModel = requires(const L &loss, const Eigen::VectorXd &beta,
                             Eigen::VectorXd &grad) {
  { loss.dimension() } -> std::convertible_to<Eigen::Index>;
  { loss.value(beta) } -> std::convertible_to<double>;
  { loss.gradient(beta) } -> std::convertible_to<Eigen::VectorXd>;
  { loss.value_and_gradient(beta, grad) } -> std::convertible_to<double>;
  { loss.lipschitz_bound() } -> std::convertible_to<double>;
};

namespace detail {

inline void check_dim(Eigen::Index got, Eigen::Index want, const char *who) {
  if (got != want)
    throw dimension_error(std::string(who) + ": expected length " +
                          std::to_string(want) + ", got " +
                          std::to_string(got));
}

} // namespace detail

/// Largest eigenvalue of X^T X, computed on whichever Gram matrix (X^T X or
/// X X^T) is smaller. A relative slack of 1e-10 keeps the value an upper
/// bound under rounding.
inline double gram_max_eigenvalue(const Eigen::MatrixXd &X) {
  Eigen::MatrixXd G = X.rows() <= X.cols() ? Eigen::MatrixXd(X * X.transpose())
                                           : Eigen::MatrixXd(X.transpose() * X);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("gram_max_eigenvalue: eigensolver failed");
  return std::max(es.eigenvalues().maxCoeff(), 0.0) * (1.0 + 1e-10);
}

/// (1/2n) sum_i (y_i - x_i^T beta)^2.
class SquaredLoss {
public:
  explicit SquaredLoss(DatasetPtr data) : data_(std::move(data)) {
    lipschitz_ = gram_max_eigenvalue(data_->X()) / static_cast<double>(data_->n());
  }

  Eigen::Index dimension() const noexcept { return data_->p(); }

  double value(const Eigen::VectorXd &beta) const {
    detail::check_dim(beta.size(), dimension(), "squared_loss");
    const Eigen::VectorXd r = data_->y() - data_->X() * beta;
    return 0.5 * r.squaredNorm() / static_cast<double>(data_->n());
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &beta) const {
    Eigen::VectorXd g;
    value_and_gradient(beta, g);
    return g;
  }

  double value_and_gradient(const Eigen::VectorXd &beta,
                            Eigen::VectorXd &grad) const {
    detail::check_dim(beta.size(), dimension(), "squared_loss");
    const double n = static_cast<double>(data_->n());
    const Eigen::VectorXd r = data_->y() - data_->X() * beta;
    grad.noalias() = -(data_->X().transpose() * r) / n;
    return 0.5 * r.squaredNorm() / n;
  }

  /// lambda_max((1/n) X^T X).
  double lipschitz_bound() const noexcept { return lipschitz_; }

  const Dataset &data() const noexcept { return *data_; }

private:
  DatasetPtr data_;
  double lipschitz_;
};

/// f(beta) = (1/2)(beta - c)^T Q (beta - c) with Q symmetric PSD. Its minimum
/// is 0 at beta = c, which makes it the workhorse for oracle tests.
class QuadraticLoss {
public:
  QuadraticLoss(Eigen::MatrixXd Q, Eigen::VectorXd center)
      : Q_(std::move(Q)), c_(std::move(center)) {
    if (Q_.rows() != Q_.cols() || Q_.rows() != c_.size())
      throw dimension_error("quadratic_loss: Q must be square and match c");
    if (!Q_.isApprox(Q_.transpose()))
      throw std::invalid_argument("quadratic_loss: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12)
      throw std::invalid_argument("quadratic_loss: Q must be PSD");
    lipschitz_ = std::max(es.eigenvalues().maxCoeff(), 0.0) * (1.0 + 1e-12);
  }

  Eigen::Index dimension() const noexcept { return c_.size(); }

  double value(const Eigen::VectorXd &beta) const {
    detail::check_dim(beta.size(), dimension(), "quadratic_loss");
    const Eigen::VectorXd d = beta - c_;
    return 0.5 * d.dot(Q_ * d);
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &beta) const {
    detail::check_dim(beta.size(), dimension(), "quadratic_loss");
    return Q_ * (beta - c_);
  }

  double value_and_gradient(const Eigen::VectorXd &beta,
                            Eigen::VectorXd &grad) const {
    detail::check_dim(beta.size(), dimension(), "quadratic_loss");
    const Eigen::VectorXd d = beta - c_;
    grad.noalias() = Q_ * d;
    return 0.5 * d.dot(grad);
  }

  double lipschitz_bound() const noexcept { return lipschitz_; }

  const Eigen::MatrixXd &hessian() const noexcept { return Q_; }
  const Eigen::VectorXd &center() const noexcept { return c_; }

private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd c_;
  double lipschitz_;
};

/// Nesterov smoothing controls: weight mu, exponent delta (mu = n^-delta when
/// built from a sample size) and proximal center u0 inside the dual box [0,1].
struct SmoothingParams {
  double mu = 1.0;
  double delta = 0.25;
  double u0 = 0.0;

  static SmoothingParams from_sample_size(Eigen::Index n, double delta = 0.25,
                                          double u0 = 0.0) {
    if (n <= 0)
      throw std::invalid_argument("smoothing: sample size must be positive");
    SmoothingParams sp{std::pow(static_cast<double>(n), -delta), delta, u0};
    sp.validate();
    return sp;
  }

  void validate() const {
    if (!(mu > 0.0) || !std::isfinite(mu))
      throw std::invalid_argument("smoothing: mu must be positive");
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("smoothing: delta must lie in (0, 1)");
    if (!(u0 >= 0.0 && u0 <= 1.0))
      throw std::invalid_argument("smoothing: u0 must lie in [0, 1]");
  }
};

struct SmoothedHinge {
  double value;
  double u_star;
};

/// max_{u in [0,1]} u*z - (mu/2)(u - u0)^2, solved in closed form.
inline SmoothedHinge smoothed_hinge_scalar(double z, const SmoothingParams &sp) noexcept {
  const double u = std::clamp(sp.u0 + z / sp.mu, 0.0, 1.0);
  const double d = u - sp.u0;
  return {u * z - 0.5 * sp.mu * d * d, u};
}

/// rho*||beta||^2 + (1/n) sum_i f_mu(1 - y_i x_i^T beta), where f_mu is the
/// smoothed hinge. The per-sample duals are independent, so each inner max
/// is solved in closed form.
class SmoothedSvmLoss {
public:
  SmoothedSvmLoss(DatasetPtr data, double rho, SmoothingParams sp)
      : data_(std::move(data)), rho_(rho), sp_(sp) {
    if (data_->kind() != DataKind::classification)
      throw std::invalid_argument("smoothed_svm_loss: labels must be -1/+1");
    if (!(rho >= 0.0))
      throw std::invalid_argument("smoothed_svm_loss: rho must be >= 0");
    sp_.validate();
    // The smoothed sum has Hessian (1/(n mu)) sum_{unclipped i} x_i x_i^T,
    // which is dominated by ||A||^2/mu for A with rows y_i x_i^T / sqrt(n).
    op_norm_sq_ = gram_max_eigenvalue(data_->X()) / static_cast<double>(data_->n());
  }

  Eigen::Index dimension() const noexcept { return data_->p(); }

  double value(const Eigen::VectorXd &beta) const {
    detail::check_dim(beta.size(), dimension(), "smoothed_svm_loss");
    const Eigen::VectorXd margin = data_->X() * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < margin.size(); ++i)
      s += smoothed_hinge_scalar(1.0 - data_->y()[i] * margin[i], sp_).value;
    return rho_ * beta.squaredNorm() + s / static_cast<double>(data_->n());
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &beta) const {
    Eigen::VectorXd g;
    value_and_gradient(beta, g);
    return g;
  }

  double value_and_gradient(const Eigen::VectorXd &beta,
                            Eigen::VectorXd &grad) const {
    detail::check_dim(beta.size(), dimension(), "smoothed_svm_loss");
    const double n = static_cast<double>(data_->n());
    const Eigen::VectorXd margin = data_->X() * beta;
    Eigen::VectorXd w(margin.size());
    double s = 0.0;
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      const auto h = smoothed_hinge_scalar(1.0 - data_->y()[i] * margin[i], sp_);
      s += h.value;
      w[i] = h.u_star * data_->y()[i];
    }
    grad.noalias() = -(data_->X().transpose() * w) / n;
    grad += 2.0 * rho_ * beta;
    return rho_ * beta.squaredNorm() + s / n;
  }

  /// 2*rho + ||A||^2 / mu.
  double lipschitz_bound() const noexcept { return 2.0 * rho_ + op_norm_sq_ / sp_.mu; }

  /// ||A||^2 with A the n x p matrix of rows y_i x_i^T / sqrt(n).
  double operator_norm_sq() const noexcept { return op_norm_sq_; }

  double rho() const noexcept { return rho_; }
  const SmoothingParams &smoothing() const noexcept { return sp_; }
  const Dataset &data() const noexcept { return *data_; }

private:
  DatasetPtr data_;
  double rho_;
  SmoothingParams sp_;
  double op_norm_sq_;
};

} // namespace fcp
