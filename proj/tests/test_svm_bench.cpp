#include <cmath>

#include <gtest/gtest.h>

#include "fcp/svm_bench.hpp"

namespace {

fcp::SimConfig small_config() {
  fcp::SimConfig c;
  c.p = 20;
  c.n_train = 40;
  c.n_test = 200;
  c.replications = 3;
  c.seed = 99;
  return c;
}

} // namespace

TEST(SvmBench, Ar1CovarianceAndUnitVariance) {
  fcp::Rng rng(5);
  const Eigen::Index n = 100000, p = 8;
  const double decay = 0.3;
  const Eigen::MatrixXd X = fcp::sample_ar1_features(n, p, decay, rng);
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd C = X.rowwise() - mean;
  for (Eigen::Index j = 0; j < p; ++j)
    EXPECT_NEAR(C.col(j).squaredNorm() / n, 1.0, 0.02);
  for (int lag : {1, 2, 5}) {
    double s = 0.0;
    for (Eigen::Index j = 0; j + lag < p; ++j)
      s += C.col(j).dot(C.col(j + lag)) / n;
    const double est = s / static_cast<double>(p - lag);
    const double target = std::pow(decay, lag);
    // One lag-covariance estimate has SE about sqrt((1 + target^2) / n).
    EXPECT_NEAR(est, target, 3.0 * std::sqrt((1 + target * target) / n)) << "lag " << lag;
  }
}

TEST(SvmBench, LabelBalance) {
  fcp::Rng rng(8);
  const auto d =
      fcp::sample_classification(100000, 10, 0.3, fcp::default_beta_star(10), rng, 0);
  const double pos = (d->y().array() > 0).cast<double>().mean();
  EXPECT_NEAR(pos, 0.5, 0.01);
}

TEST(SvmBench, DefaultBetaStar) {
  const auto b = fcp::default_beta_star(7);
  Eigen::VectorXd want(7);
  want << 3, 5, 0, 0, 1.5, 0, 0;
  EXPECT_EQ(b, want);
}

TEST(SvmBench, ClassificationErrorConventions) {
  fcp::Rng rng(2);
  const auto bstar = fcp::default_beta_star(10);
  const auto d = fcp::sample_classification(500, 10, 0.3, bstar, rng, 0, /*noise_sd=*/0.0);
  EXPECT_EQ(fcp::classification_error(bstar, *d), 0.0);
  EXPECT_EQ(fcp::classification_error(-bstar, *d), 1.0);
  const double neg = (d->y().array() < 0).cast<double>().mean();
  EXPECT_DOUBLE_EQ(fcp::classification_error(Eigen::VectorXd::Zero(10), *d), neg);
}

TEST(SvmBench, SeparableTwoPointsAreFitByEveryVariant) {
  Eigen::MatrixXd X(2, 2);
  X << 1, 0, -1, 0;
  const auto d = fcp::make_dataset(X, Eigen::Vector2d(1, -1), fcp::DataKind::classification);
  const auto sp = fcp::SmoothingParams::from_sample_size(2);
  for (auto v : fcp::all_svm_variants) {
    const auto fit = fcp::train_variant(v, d, sp, fcp::SvmHyper{});
    EXPECT_EQ(fcp::classification_error(fit.beta, *d), 0.0) << fcp::to_string(v);
  }
}

TEST(SvmBench, GenerationIsDeterministicPerReplication) {
  const auto c = small_config();
  const auto a = fcp::generate_dataset(c, 1), b = fcp::generate_dataset(c, 1);
  EXPECT_EQ(a.train->X(), b.train->X());
  EXPECT_EQ(a.test->y(), b.test->y());
  EXPECT_NE(fcp::generate_dataset(c, 2).train->X(), a.train->X());
  EXPECT_EQ(a.train->n(), 40);
  EXPECT_EQ(a.test->n(), 200);
}

TEST(SvmBench, ConfigValidation) {
  auto c = small_config();
  c.p = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.decay = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config();
  c.beta_star = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(fcp::run_benchmark(small_config(), {}), std::invalid_argument);
}

TEST(SvmBench, FcpInvariantsPerReplication) {
  const auto c = small_config();
  const auto recs = fcp::run_replication(c, 0);
  ASSERT_EQ(recs.size(), 4u);
  for (const auto &r : recs) {
    EXPECT_TRUE(r.ok) << r.failure;
    EXPECT_GE(r.test_error, 0.0);
    EXPECT_LE(r.test_error, 1.0);
  }
  const auto &f = recs[3];
  EXPECT_EQ(f.variant, fcp::SvmVariant::fcp);
  EXPECT_TRUE(f.criteria_met);
  EXPECT_TRUE(f.s3onc_ok);
  EXPECT_TRUE(f.exclusion_ok);
  EXPECT_TRUE(f.best_le_init);
  EXPECT_TRUE(f.lemma_ok);
  EXPECT_GT(f.effective_a, 0.0);
}

TEST(SvmBench, ReportIsIndependentOfThreadCount) {
  const auto c = small_config();
  const auto r1 = fcp::run_benchmark(c, {10, 20}, 1);
  const auto r3 = fcp::run_benchmark(c, {10, 20}, 3);
  ASSERT_EQ(r1.records.size(), 4u * 2u * 3u);
  ASSERT_EQ(r1.records.size(), r3.records.size());
  for (std::size_t i = 0; i < r1.records.size(); ++i) {
    EXPECT_EQ(r1.records[i].variant, r3.records[i].variant);
    EXPECT_EQ(r1.records[i].p, r3.records[i].p);
    EXPECT_EQ(r1.records[i].replication, r3.records[i].replication);
    EXPECT_EQ(r1.records[i].test_error, r3.records[i].test_error);
    EXPECT_EQ(r1.records[i].objective, r3.records[i].objective);
  }
  EXPECT_TRUE(r1.complete());
  for (std::size_t i = 1; i < r1.records.size(); ++i) {
    const auto &a = r1.records[i - 1], &b = r1.records[i];
    EXPECT_TRUE(std::tie(a.variant, a.p, a.replication) < std::tie(b.variant, b.p, b.replication));
  }
}

TEST(SvmBench, SummaryMeanAndStandardError) {
  std::vector<fcp::ReplicationRecord> recs(3);
  const double errs[] = {0.1, 0.2, 0.4};
  for (int i = 0; i < 3; ++i) {
    recs[i].variant = fcp::SvmVariant::l1;
    recs[i].p = 5;
    recs[i].replication = i;
    recs[i].test_error = errs[i];
  }
  const auto rows = fcp::summarize(recs);
  ASSERT_EQ(rows.size(), 1u);
  const double mean = (10 + 20 + 40) / 3.0;
  const double sd = std::sqrt(((10 - mean) * (10 - mean) + (20 - mean) * (20 - mean) +
                               (40 - mean) * (40 - mean)) / 2.0);
  EXPECT_NEAR(rows[0].mean_error_percent, mean, 1e-12);
  EXPECT_NEAR(rows[0].se_percent, sd / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(rows[0].replications, 3);
}

TEST(SvmBench, AOverrideOnlyWhenNeeded) {
  EXPECT_EQ(fcp::effective_mcp_a(0.3, 1.0, 0.99), 0.3);
  EXPECT_DOUBLE_EQ(fcp::effective_mcp_a(0.3, 10.0, 0.99), 0.099);
}
