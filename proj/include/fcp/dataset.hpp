#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "fcp/errors.hpp"

namespace fcp {

enum class DataKind { classification, regression };

/// Features X (n x p) and responses y (n). Classification labels live in
/// {-1, +1}. Immutable once built; losses share it through shared_ptr.
class Dataset {
public:
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, DataKind kind,
          std::uint64_t seed = 0)
      : X_(std::move(X)), y_(std::move(y)), kind_(kind), seed_(seed) {
    if (X_.rows() != y_.size())
      throw dimension_error("dataset: X has " + std::to_string(X_.rows()) +
                            " rows but y has " + std::to_string(y_.size()) +
                            " entries");
    if (X_.rows() == 0)
      throw dimension_error("dataset: no samples");
    if (kind_ == DataKind::classification) {
      for (Eigen::Index i = 0; i < y_.size(); ++i)
        if (y_[i] != 1.0 && y_[i] != -1.0)
          throw std::invalid_argument("dataset: classification labels must "
                                      "be -1 or +1");
    }
  }

  const Eigen::MatrixXd &X() const noexcept { return X_; }
  const Eigen::VectorXd &y() const noexcept { return y_; }
  DataKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Eigen::Index n() const noexcept { return X_.rows(); }
  Eigen::Index p() const noexcept { return X_.cols(); }

private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  DataKind kind_;
  std::uint64_t seed_;
};

using DatasetPtr = std::shared_ptr<const Dataset>;

inline DatasetPtr make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                               DataKind kind, std::uint64_t seed = 0) {
  return std::make_shared<const Dataset>(std::move(X), std::move(y), kind,
                                         seed);
}

} // namespace fcp
