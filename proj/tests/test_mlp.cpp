#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fcp/mlp.hpp"
#include "oracles.hpp"

namespace {

// Loop-based forward pass written against the documented layout: per layer,
// row-major weights (out x in) followed by the biases. Also reports the
// smallest |pre-activation| of any hidden unit.
double reference_forward(const std::vector<int> &sizes, const Eigen::VectorXd &beta,
                         const Eigen::VectorXd &x, double *min_abs_pre = nullptr) {
  std::vector<double> h(x.data(), x.data() + x.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double s = beta[static_cast<Eigen::Index>(off + in * out + o)];
      for (int i = 0; i < in; ++i)
        s += beta[static_cast<Eigen::Index>(off + o * in + i)] * h[i];
      const bool hidden = l + 2 < sizes.size();
      if (hidden && min_abs_pre)
        *min_abs_pre = std::min(*min_abs_pre, std::abs(s));
      z[o] = hidden ? std::max(s, 0.0) : s;
    }
    off += static_cast<std::size_t>((in + 1) * out);
    h = std::move(z);
  }
  return h[0];
}

fcp::DatasetPtr random_regression(int n, int d, std::mt19937_64 &rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd X(n, d);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      X(i, j) = z(rng);
    y[i] = z(rng);
  }
  return fcp::make_dataset(X, y, fcp::DataKind::regression);
}

} // namespace

TEST(Mlp, ArchitectureValidationAndCount) {
  EXPECT_THROW(fcp::MLPArchitecture({3}), std::invalid_argument);
  EXPECT_THROW(fcp::MLPArchitecture({3, 2}), std::invalid_argument);
  EXPECT_THROW(fcp::MLPArchitecture({3, 0, 1}), std::invalid_argument);
  const fcp::MLPArchitecture a({4, 16, 16, 1});
  EXPECT_EQ(a.parameter_count(), 5 * 16 + 17 * 16 + 17 * 1);
  EXPECT_EQ(a.layer_offset(1), 80);
}

TEST(Mlp, ZeroParametersGiveZeroOutput) {
  const fcp::MLPArchitecture a({3, 5, 1});
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(a.parameter_count());
  EXPECT_EQ(fcp::mlp_forward(a, b, Eigen::Vector3d(1, -2, 7)), 0.0);
}

TEST(Mlp, SingleHiddenUnitHandTrace) {
  const fcp::MLPArchitecture a({1, 1, 1});
  Eigen::VectorXd b(4);
  b << 1.0, 0.0, 1.0, 0.0; // w, bias, output weight, output bias
  EXPECT_EQ(fcp::mlp_forward(a, b, Eigen::VectorXd::Constant(1, 2.0)), 2.0);
  EXPECT_EQ(fcp::mlp_forward(a, b, Eigen::VectorXd::Constant(1, -2.0)), 0.0);
}

TEST(Mlp, ForwardMatchesReferenceAndOutputLayerIsLinear) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z;
  const std::vector<int> sizes{3, 6, 4, 1};
  const fcp::MLPArchitecture a(sizes);
  for (int t = 0; t < 50; ++t) {
    Eigen::VectorXd b(a.parameter_count()), x(3);
    for (auto &v : b)
      v = z(rng);
    for (auto &v : x)
      v = z(rng);
    const double f = fcp::mlp_forward(a, b, x);
    EXPECT_NEAR(f, reference_forward(sizes, b, x), 1e-12 * (1 + std::abs(f)));
    Eigen::VectorXd b2 = b;
    const Eigen::Index off = a.layer_offset(2);
    b2.segment(off, 5) *= 2.0;
    EXPECT_NEAR(fcp::mlp_forward(a, b2, x), 2 * f, 1e-12 * (1 + std::abs(f)));
  }
}

TEST(Mlp, LossZeroCases) {
  std::mt19937_64 rng(1);
  const fcp::MLPArchitecture a({2, 3, 1});
  auto d = fcp::make_dataset(Eigen::MatrixXd::Random(5, 2), Eigen::VectorXd::Zero(5),
                             fcp::DataKind::regression);
  fcp::MlpSquaredLoss loss(a, d);
  const Eigen::VectorXd b = Eigen::VectorXd::Zero(a.parameter_count());
  EXPECT_EQ(loss.value(b), 0.0);
  EXPECT_EQ(loss.gradient(b).norm(), 0.0);

  // Realizable: y = relu(x1) exactly with one active unit.
  const fcp::MLPArchitecture a1({1, 1, 1});
  Eigen::MatrixXd X(4, 1);
  X << -1, 0.5, 2, 3;
  Eigen::VectorXd y = X.col(0).cwiseMax(0.0);
  fcp::MlpSquaredLoss fit(a1, fcp::make_dataset(X, y, fcp::DataKind::regression));
  Eigen::VectorXd bb(4);
  bb << 1, 0, 1, 0;
  EXPECT_EQ(fit.value(bb), 0.0);
}

TEST(Mlp, BackpropMatchesFiniteDifferencesAwayFromKinks) {
  std::mt19937_64 rng(19);
  std::normal_distribution<double> z;
  const std::vector<int> sizes{2, 3, 1};
  const fcp::MLPArchitecture a(sizes);
  int probes = 0;
  while (probes < 100) {
    auto d = random_regression(5, 2, rng);
    Eigen::VectorXd b(a.parameter_count());
    for (auto &v : b)
      v = z(rng);
    double margin = 1e300;
    for (int i = 0; i < 5; ++i)
      reference_forward(sizes, b, d->X().row(i).transpose(), &margin);
    if (margin < 1e-3)
      continue; // resample: too close to a ReLU kink
    fcp::MlpSquaredLoss loss(a, d);
    const auto fd = oracle::numeric_gradient([&](auto &x) { return loss.value(x); }, b, 1e-6);
    const Eigen::VectorXd g = loss.gradient(b);
    EXPECT_LT((g - fd).norm() / std::max(g.norm(), 1e-8), 1e-5);
    ++probes;
  }
}

TEST(Mlp, LipschitzEstimateIsPositiveAndDeterministic) {
  std::mt19937_64 r(3);
  auto d = random_regression(20, 2, r);
  const fcp::MLPArchitecture a({2, 4, 1});
  fcp::LipschitzEstimateConfig cfg;
  cfg.pairs = 50;
  fcp::Rng r1(42), r2(42);
  const double m1 = fcp::estimate_mlp_lipschitz(a, d, cfg, r1);
  const double m2 = fcp::estimate_mlp_lipschitz(a, d, cfg, r2);
  EXPECT_GT(m1, 0.0);
  EXPECT_EQ(m1, m2);
}
