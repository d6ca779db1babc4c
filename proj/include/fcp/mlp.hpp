#pragma once

/// @file
/// Fully connected ReLU network with a single linear output and its squared
/// training loss with a backpropagated gradient.
///
/// Parameter layout: for each computing layer (fan_in -> fan_out) the weight
/// matrix in row-major order (fan_out rows of fan_in entries) followed by the
/// fan_out biases. Layers are stored from input to output.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "fcp/dataset.hpp"
#include "fcp/errors.hpp"
#include "fcp/losses.hpp"
#include "fcp/rng.hpp"

namespace fcp {

class MLPArchitecture {
public:
  explicit MLPArchitecture(std::vector<int> layer_sizes)
      : sizes_(std::move(layer_sizes)) {
    if (sizes_.size() < 2)
      throw std::invalid_argument("mlp: need at least input and output layers");
    if (sizes_.back() != 1)
      throw std::invalid_argument("mlp: output layer must have exactly 1 unit");
    for (int s : sizes_)
      if (s <= 0)
        throw std::invalid_argument("mlp: layer sizes must be positive");
  }

  const std::vector<int> &layer_sizes() const noexcept { return sizes_; }
  int input_size() const noexcept { return sizes_.front(); }
  std::size_t num_layers() const noexcept { return sizes_.size() - 1; }

  /// sum over computing layers of (fan_in + 1) * fan_out.
  Eigen::Index parameter_count() const noexcept {
    Eigen::Index p = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
      p += static_cast<Eigen::Index>(sizes_[l] + 1) * sizes_[l + 1];
    return p;
  }

  /// Offset of layer l's weight block within the parameter vector.
  Eigen::Index layer_offset(std::size_t l) const noexcept {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < l; ++k)
      off += static_cast<Eigen::Index>(sizes_[k] + 1) * sizes_[k + 1];
    return off;
  }

private:
  std::vector<int> sizes_;
};

namespace detail {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline RowMajorMap layer_weights(const MLPArchitecture &arch,
                                 const Eigen::VectorXd &beta, std::size_t l) {
  const int in = arch.layer_sizes()[l], out = arch.layer_sizes()[l + 1];
  return RowMajorMap(beta.data() + arch.layer_offset(l), out, in);
}

inline Eigen::Map<const Eigen::VectorXd>
layer_bias(const MLPArchitecture &arch, const Eigen::VectorXd &beta, std::size_t l) {
  const int in = arch.layer_sizes()[l], out = arch.layer_sizes()[l + 1];
  return Eigen::Map<const Eigen::VectorXd>(
      beta.data() + arch.layer_offset(l) + static_cast<Eigen::Index>(in) * out, out);
}

} // namespace detail

inline double mlp_forward(const MLPArchitecture &arch, const Eigen::VectorXd &beta,
                          const Eigen::Ref<const Eigen::VectorXd> &x) {
  detail::check_dim(beta.size(), arch.parameter_count(), "mlp_forward(beta)");
  detail::check_dim(x.size(), arch.input_size(), "mlp_forward(x)");
  Eigen::VectorXd h = x;
  const std::size_t L = arch.num_layers();
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::VectorXd z = detail::layer_weights(arch, beta, l) * h +
                        detail::layer_bias(arch, beta, l);
    h = (l + 1 < L) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
  }
  return h[0];
}

/// (1/2n) sum_i (y_i - F(x_i, beta))^2. The ReLU derivative at 0 is taken
/// as 0.
class MlpSquaredLoss {
public:
  MlpSquaredLoss(MLPArchitecture arch, DatasetPtr data, double lipschitz = 0.0)
      : arch_(std::move(arch)), data_(std::move(data)), lipschitz_(lipschitz) {
    detail::check_dim(data_->p(), arch_.input_size(), "mlp_squared_loss(data)");
  }

  Eigen::Index dimension() const noexcept { return arch_.parameter_count(); }

  double value(const Eigen::VectorXd &beta) const {
    detail::check_dim(beta.size(), dimension(), "mlp_squared_loss");
    double s = 0.0;
    for (Eigen::Index i = 0; i < data_->n(); ++i) {
      const double r = data_->y()[i] - mlp_forward(arch_, beta, data_->X().row(i).transpose());
      s += r * r;
    }
    return 0.5 * s / static_cast<double>(data_->n());
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd &beta) const {
    Eigen::VectorXd g;
    value_and_gradient(beta, g);
    return g;
  }

  double value_and_gradient(const Eigen::VectorXd &beta, Eigen::VectorXd &grad) const {
    detail::check_dim(beta.size(), dimension(), "mlp_squared_loss");
    const std::size_t L = arch_.num_layers();
    const auto &sizes = arch_.layer_sizes();
    const double n = static_cast<double>(data_->n());
    grad.setZero(dimension());

    std::vector<Eigen::VectorXd> act(L + 1), pre(L);
    double s = 0.0;
    for (Eigen::Index i = 0; i < data_->n(); ++i) {
      act[0] = data_->X().row(i).transpose();
      for (std::size_t l = 0; l < L; ++l) {
        pre[l] = detail::layer_weights(arch_, beta, l) * act[l] +
                 detail::layer_bias(arch_, beta, l);
        act[l + 1] = (l + 1 < L) ? Eigen::VectorXd(pre[l].cwiseMax(0.0)) : pre[l];
      }
      const double r = act[L][0] - data_->y()[i];
      s += r * r;

      // delta holds dLoss_i/dpre[l].
      Eigen::VectorXd delta = Eigen::VectorXd::Constant(1, r / n);
      for (std::size_t l = L; l-- > 0;) {
        const int in = sizes[l], out = sizes[l + 1];
        const Eigen::Index off = arch_.layer_offset(l);
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> gW(
            grad.data() + off, out, in);
        Eigen::Map<Eigen::VectorXd> gb(grad.data() + off + static_cast<Eigen::Index>(in) * out,
                                       out);
        gW.noalias() += delta * act[l].transpose();
        gb += delta;
        if (l > 0) {
          Eigen::VectorXd back = detail::layer_weights(arch_, beta, l).transpose() * delta;
          for (Eigen::Index k = 0; k < back.size(); ++k)
            if (!(pre[l - 1][k] > 0.0))
              back[k] = 0.0;
          delta = std::move(back);
        }
      }
    }
    return 0.5 * s / n;
  }

  /// Set by the caller, usually from estimate_mlp_lipschitz.
  double lipschitz_bound() const noexcept { return lipschitz_; }

  const MLPArchitecture &architecture() const noexcept { return arch_; }
  const Dataset &data() const noexcept { return *data_; }

private:
  MLPArchitecture arch_;
  DatasetPtr data_;
  double lipschitz_;
};

struct LipschitzEstimateConfig {
  double box_radius = 1.0;    ///< sample beta with ||beta||_inf <= R
  int pairs = 200;
  double perturbation = 1e-2; ///< relative size of the second point's offset
  double safety_factor = 1.2;
};

/// Sampled gradient-Lipschitz estimate for the MLP loss: safety_factor times
/// the largest observed ||g(b1) - g(b2)|| / ||b1 - b2||, over random pairs
/// and over single-coordinate perturbations (the per-coordinate ratio).
inline double estimate_mlp_lipschitz(const MLPArchitecture &arch, const DatasetPtr &data,
                                     const LipschitzEstimateConfig &cfg, Rng &rng) {
  MlpSquaredLoss loss(arch, data);
  const Eigen::Index p = arch.parameter_count();
  std::uniform_real_distribution<double> box(-cfg.box_radius, cfg.box_radius);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> coord(0, p - 1);

  double worst = 0.0;
  Eigen::VectorXd b1(p), dir(p);
  for (int k = 0; k < cfg.pairs; ++k) {
    for (Eigen::Index j = 0; j < p; ++j)
      b1[j] = box(rng);
    const double h = cfg.perturbation * cfg.box_radius;
    if (k % 2 == 0) {
      for (Eigen::Index j = 0; j < p; ++j)
        dir[j] = gauss(rng);
      dir *= h / dir.norm();
    } else {
      dir.setZero();
      dir[coord(rng)] = h;
    }
    const Eigen::VectorXd g1 = loss.gradient(b1);
    const Eigen::VectorXd g2 = loss.gradient(b1 + dir);
    worst = std::max(worst, (g1 - g2).norm() / dir.norm());
  }
  return cfg.safety_factor * worst;
}

} // namespace fcp
