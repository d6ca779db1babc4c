#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fcp/cli.hpp"
#include "fcp/csv.hpp"

namespace fs = std::filesystem;
using namespace fcp::cli;

namespace {

class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("fcp_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path &path() const { return path_; }
  std::string file(const std::string &name, const std::string &content) const {
    std::ofstream(path_ / name) << content;
    return (path_ / name).string();
  }

private:
  fs::path path_;
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t data_rows(const fs::path &p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!header) {
      header = true;
      continue;
    }
    ++n;
  }
  return n;
}

RunManifest manifest(Command c, const fs::path &out, Settings overrides = {}) {
  RunManifest m;
  m.command = c;
  m.output_path = out.string();
  m.overrides = std::move(overrides);
  return m;
}

} // namespace

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(fcp::csv::parse_double(fcp::csv::format_double(x)), x);
  }
  EXPECT_EQ(fcp::csv::format_double(0.1), "0.10000000000000001");
}

TEST(Csv, ParsesMetadataHeaderAndRows) {
  std::istringstream in("# made by hand\ny,x1,x2\n1,2,3\n\n-1, 0.5 ,1e-3\r\n");
  const auto t = fcp::csv::read_numeric(in);
  EXPECT_EQ(t.metadata, std::vector<std::string>{"made by hand"});
  EXPECT_EQ(t.header, (std::vector<std::string>{"y", "x1", "x2"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][2], 1e-3);
  EXPECT_EQ(t.column("x2"), 2u);
  EXPECT_THROW(t.column("z"), std::invalid_argument);
}

TEST(Csv, DiagnosticsCarryLineNumbers) {
  std::istringstream ragged("a,b\n1,2\n3\n");
  try {
    fcp::csv::read_numeric(ragged, "f.csv");
    FAIL();
  } catch (const fcp::csv::parse_error &e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("f.csv:3"), std::string::npos);
  }
  std::istringstream text("a,b\n1,x\n");
  EXPECT_THROW(fcp::csv::read_numeric(text), fcp::csv::parse_error);
  std::istringstream empty("# only comments\n");
  EXPECT_THROW(fcp::csv::read_numeric(empty), fcp::csv::parse_error);
  std::istringstream quoted("a\n\"1\"\n");
  EXPECT_THROW(fcp::csv::read_numeric(quoted), fcp::csv::parse_error);
}

TEST(Config, ParsesFlatKeyValueAndRejectsGarbage) {
  std::istringstream in("# comment\n lambda = 0.5\n\np_grid=100,200\n");
  const auto s = parse_config(in, "cfg");
  EXPECT_EQ(s.at("lambda"), "0.5");
  EXPECT_EQ(s.at("p_grid"), "100,200");
  std::istringstream bad("lambda 0.5\n");
  EXPECT_THROW(parse_config(bad, "cfg"), usage_error);
}

TEST(Config, FlagsWinOverFileAndUnknownKeysFail) {
  TempDir d;
  RunManifest m = manifest(Command::svm_bench, d.path(), {{"lambda", "0.4"}});
  m.config_path = d.file("c.cfg", "lambda=0.3\nrho=0.2\n");
  m.seed = 5;
  const auto s = resolve_settings(m);
  EXPECT_EQ(s.at("lambda"), "0.4");
  EXPECT_EQ(s.at("rho"), "0.2");
  EXPECT_EQ(s.at("seed"), "5");
  m.overrides["init"] = "zero"; // a solve-only key
  EXPECT_THROW(resolve_settings(m), usage_error);
}

TEST(Cli, SolveQuadraticFixture) {
  TempDir d;
  const auto in = d.file("q.csv", "y,x\n3,1\n");
  std::ostringstream out, err;
  const int rc = execute(manifest(Command::solve, d.path() / "o",
                                  {{"input", in}, {"lambda", "1"}, {"a", "0.5"}}),
                         out, err);
  EXPECT_EQ(rc, exit_ok) << err.str();
  const auto t = fcp::csv::read_numeric_file((d.path() / "o" / "solution.csv").string());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_NEAR(t.rows[0][1], 3.0, 1e-3);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
  EXPECT_NE(slurp(d.path() / "o" / "certificate.csv").find("criteria_met"), std::string::npos);
}

TEST(Cli, SolveHugeLambdaGivesZero) {
  TempDir d;
  const auto in = d.file("q.csv", "y,x1,x2\n3,1,0\n-1,0,2\n");
  std::ostringstream out, err;
  EXPECT_EQ(execute(manifest(Command::solve, d.path(), {{"input", in}, {"lambda", "1e6"}}), out,
                    err),
            exit_ok);
  const auto t = fcp::csv::read_numeric_file((d.path() / "solution.csv").string());
  for (const auto &r : t.rows)
    EXPECT_EQ(r[1], 0.0);
}

TEST(Cli, SolveSmoothedHinge) {
  TempDir d;
  const auto in = d.file("c.csv", "label,x1,x2\n1,2,0.1\n-1,-1.5,0.3\n1,1,-0.2\n-1,-2,0\n");
  std::ostringstream out, err;
  EXPECT_EQ(execute(manifest(Command::solve, d.path(),
                             {{"input", in}, {"response", "label"}, {"loss", "smoothed_hinge"},
                              {"lambda", "0.05"}, {"init", "lasso"}}),
                    out, err),
            exit_ok)
      << err.str();
}

TEST(Cli, MalformedInputExitsOneWithDiagnostics) {
  TempDir d;
  const auto in = d.file("bad.csv", "y,x\n3,abc\n");
  std::ostringstream out, err;
  EXPECT_EQ(execute(manifest(Command::solve, d.path() / "o", {{"input", in}}), out, err),
            exit_invalid);
  EXPECT_NE(err.str().find("bad.csv:2"), std::string::npos);
  EXPECT_FALSE(fs::exists(d.path() / "o"));
  EXPECT_EQ(execute(manifest(Command::solve, d.path(), {{"input", in}, {"loss", "nope"}}), out,
                    err),
            exit_invalid);
  EXPECT_EQ(execute(manifest(Command::solve, d.path(), {}), out, err), exit_invalid);
}

TEST(Cli, CheckPassAndCertificateFailure) {
  TempDir d;
  const auto zero_grad = d.file("z.csv", "y,x1,x2\n0,1,2\n0,-1,0.5\n");
  const auto zero_beta = d.file("b0.csv", "index,beta\n0,0\n1,0\n");
  std::ostringstream out, err;
  EXPECT_EQ(execute(manifest(Command::check, d.path(),
                             {{"input", zero_grad}, {"beta", zero_beta}, {"lambda", "1"}}),
                    out, err),
            exit_ok)
      << err.str();
  const auto q = d.file("q.csv", "y,x\n3,1\n");
  const auto half = d.file("b.csv", "beta\n0.25\n"); // a*lambda/2 with a=0.5, lambda=1
  EXPECT_EQ(execute(manifest(Command::check, d.path(),
                             {{"input", q}, {"beta", half}, {"lambda", "1"}, {"a", "0.5"}}),
                    out, err),
            exit_certificate);
  const auto wrong_len = d.file("w.csv", "beta\n1\n2\n");
  EXPECT_EQ(execute(manifest(Command::check, d.path(), {{"input", q}, {"beta", wrong_len}}), out,
                    err),
            exit_invalid);
}

TEST(Cli, SvmBenchWritesDetailAndSummary) {
  TempDir d;
  std::ostringstream out, err;
  RunManifest m = manifest(Command::svm_bench, d.path(),
                           {{"p_grid", "100"}, {"replications", "2"}});
  ASSERT_EQ(execute(m, out, err), exit_ok) << err.str();
  EXPECT_EQ(data_rows(d.path() / "svm_bench.csv"), 8u);
  EXPECT_EQ(data_rows(d.path() / "svm_bench_summary.csv"), 4u);
  const std::string first = slurp(d.path() / "svm_bench.csv");
  EXPECT_EQ(first.rfind("# fcp ", 0), 0u);
  EXPECT_NE(first.find("# seed=20190101"), std::string::npos);
  EXPECT_NE(first.find("variant,p,replication,seed,test_error,iterations,objective,effective_a"),
            std::string::npos);
  m.threads = 2;
  ASSERT_EQ(execute(m, out, err), exit_ok);
  EXPECT_EQ(slurp(d.path() / "svm_bench.csv"), first);
}

TEST(Cli, SvmBenchInvalidGridWritesNothing) {
  TempDir d;
  std::ostringstream out, err;
  EXPECT_EQ(execute(manifest(Command::svm_bench, d.path() / "o", {{"p_grid", "0"}}), out, err),
            exit_invalid);
  EXPECT_FALSE(fs::exists(d.path() / "o"));
  RunManifest m = manifest(Command::svm_bench, d.path() / "o");
  m.threads = 0;
  EXPECT_EQ(execute(m, out, err), exit_invalid);
}

TEST(Cli, NnTrainIsReproducible) {
  TempDir d;
  std::ostringstream out, err;
  const Settings s{{"replications", "2"}, {"hidden", "6"}, {"n_train", "25"}, {"n_test", "100"}};
  ASSERT_EQ(execute(manifest(Command::nn_train, d.path() / "a", s), out, err), exit_ok)
      << err.str();
  RunManifest m = manifest(Command::nn_train, d.path() / "b", s);
  m.threads = 2;
  ASSERT_EQ(execute(m, out, err), exit_ok);
  const std::string a = slurp(d.path() / "a" / "nn_sweep.csv");
  EXPECT_EQ(a, slurp(d.path() / "b" / "nn_sweep.csv"));
  EXPECT_EQ(slurp(d.path() / "a" / "nn_trend.csv"), slurp(d.path() / "b" / "nn_trend.csv"));
  EXPECT_NE(a.find("objective,test_mse,replication"), std::string::npos);
  EXPECT_EQ(data_rows(d.path() / "a" / "nn_sweep.csv"), 12u);
}
