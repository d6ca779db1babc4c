#pragma once
// Command implementations behind the `fcp` executable. Argument parsing
// lives in the tool; everything here works on a resolved RunManifest so it
// can be driven directly from tests.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fcp/csv.hpp"
#include "fcp/dataset.hpp"
#include "fcp/lasso.hpp"
#include "fcp/losses.hpp"
#include "fcp/nn_experiment.hpp"
#include "fcp/penalty.hpp"
#include "fcp/solver.hpp"
#include "fcp/svm_bench.hpp"

#ifndef FCP_VERSION
#define FCP_VERSION "0.1.0"
#endif

namespace fcp::cli {

enum class Command { svm_bench, nn_train, solve, check };

enum ExitCode : int { exit_ok = 0, exit_invalid = 1, exit_partial = 2, exit_certificate = 3 };

/// Invalid user input; maps to exit code 1.
class usage_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline const char *to_string(Command c) noexcept {
  switch (c) {
  case Command::svm_bench: return "svm-bench";
  case Command::nn_train: return "nn-train";
  case Command::solve: return "solve";
  case Command::check: return "check";
  }
  return "?";
}

inline Command parse_command(const std::string &s) {
  for (Command c : {Command::svm_bench, Command::nn_train, Command::solve, Command::check})
    if (s == to_string(c))
      return c;
  throw usage_error("unknown command '" + s + "'");
}

using Settings = std::map<std::string, std::string>;

/// Defaults for every key a command accepts. Anything else is rejected.
inline Settings default_settings(Command c) {
  switch (c) {
  case Command::svm_bench:
    return {{"seed", "20190101"},     {"replications", "100"},  {"p_grid", "100,200,500"},
            {"n_train", "100"},       {"n_test", "1000"},       {"decay", "0.3"},
            {"rho", "0.1"},           {"lambda_l1", "0.1"},     {"lambda", "0.25"},
            {"a", "0.3"},             {"a_safety", "0.99"},     {"gamma_hat", "0.001"},
            {"alpha_hat", "1"},       {"smoothing_delta", "0.25"},
            {"max_iter", "2000000"}};
  case Command::nn_train:
    return {{"seed", "7"},          {"replications", "20"},    {"hidden", "16,16"},
            {"n_train", "60"},      {"n_test", "1000"},        {"noise_sd", "0.1"},
            {"init_sd", "0.1"},     {"lambda", "0.02"},        {"a", "0.5"},
            {"gamma_hat", "0.01"},  {"alpha_hat", "1"},        {"max_iter", "400000"},
            {"lipschitz_box", "1"}, {"lipschitz_pairs", "200"},
            {"levels", "0.5,0.25,0.1,0.03,0.01,0"}};
  case Command::solve:
  case Command::check: {
    Settings s{{"seed", "0"},      {"input", ""},        {"loss", "squared"},
               {"response", "y"},  {"lambda", "0.1"},    {"a", "auto"},
               {"rho", "0"},       {"smoothing_delta", "0.25"},
               {"gamma_hat", "0.001"}};
    if (c == Command::solve) {
      s["alpha_hat"] = "auto";
      s["max_iter"] = "0";
      s["init"] = "zero";
    } else {
      s["beta"] = "";
    }
    return s;
  }
  }
  return {};
}

/// Flat `key = value` lines; '#' starts a comment line.
inline Settings parse_config(std::istream &in, const std::string &source) {
  Settings out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = csv::trim(line);
    if (t.empty() || t[0] == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw usage_error(source + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = csv::trim(t.substr(0, eq));
    if (key.empty())
      throw usage_error(source + ":" + std::to_string(lineno) + ": empty key");
    out[key] = csv::trim(t.substr(eq + 1));
  }
  return out;
}

struct RunManifest {
  Command command = Command::solve;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::string output_path = ".";
  unsigned threads = 1;
  Settings overrides; ///< command-line values; they win over the config file
};

/// Defaults, then config file, then overrides. Unknown keys are an error.
inline Settings resolve_settings(const RunManifest &m) {
  Settings s = default_settings(m.command);
  auto apply = [&](const Settings &src, const std::string &origin) {
    for (const auto &[k, v] : src) {
      if (!s.count(k))
        throw usage_error(origin + ": key '" + k + "' does not apply to " +
                          to_string(m.command));
      s[k] = v;
    }
  };
  if (m.config_path) {
    std::ifstream in(*m.config_path);
    if (!in)
      throw usage_error("cannot open config '" + *m.config_path + "'");
    apply(parse_config(in, *m.config_path), *m.config_path);
  }
  apply(m.overrides, "command line");
  if (m.seed)
    s["seed"] = std::to_string(*m.seed);
  if (m.threads == 0)
    throw usage_error("threads must be positive");
  return s;
}

namespace detail {

inline double get_double(const Settings &s, const std::string &k) {
  try {
    return csv::parse_double(s.at(k));
  } catch (const std::invalid_argument &) {
    throw usage_error("'" + k + "' must be a number, got '" + s.at(k) + "'");
  }
}

inline long long get_int(const Settings &s, const std::string &k) {
  const std::string &v = s.at(k);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size())
      throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw usage_error("'" + k + "' must be an integer, got '" + v + "'");
  }
}

inline long long get_positive(const Settings &s, const std::string &k) {
  const long long x = get_int(s, k);
  if (x <= 0)
    throw usage_error("'" + k + "' must be positive");
  return x;
}

inline std::uint64_t get_seed(const Settings &s) {
  const std::string &v = s.at("seed");
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size() || v[0] == '-')
      throw std::invalid_argument(v);
    return x;
  } catch (const std::exception &) {
    throw usage_error("'seed' must be a non-negative integer, got '" + v + "'");
  }
}

inline std::vector<double> get_list(const Settings &s, const std::string &k) {
  std::vector<double> out;
  for (const auto &tok : csv::split(s.at(k))) {
    try {
      out.push_back(csv::parse_double(tok));
    } catch (const std::invalid_argument &) {
      throw usage_error("'" + k + "' must be a comma-separated list of numbers");
    }
  }
  return out;
}

inline std::optional<double> get_auto(const Settings &s, const std::string &k) {
  if (s.at(k) == "auto")
    return std::nullopt;
  return get_double(s, k);
}

/// Version, command, and every resolved key, in key order.
inline void write_header(csv::Writer &w, Command c, const Settings &s) {
  w.meta(std::string("fcp ") + FCP_VERSION);
  w.meta(std::string("command=") + to_string(c));
  for (const auto &[k, v] : s)
    w.meta(k + "=" + v);
}

inline std::filesystem::path prepare_output(const std::string &dir) {
  std::filesystem::path p(dir);
  std::error_code ec;
  std::filesystem::create_directories(p, ec);
  if (ec || !std::filesystem::is_directory(p))
    throw usage_error("output directory '" + dir + "' is not writable");
  return p;
}

inline void write_file(const std::filesystem::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out)
    throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace detail

struct SvmBenchPlan {
  SimConfig sim;
  std::vector<Eigen::Index> p_grid;
};

inline SvmBenchPlan plan_svm_bench(const Settings &s) {
  using namespace detail;
  SvmBenchPlan plan;
  SimConfig &c = plan.sim;
  c.seed = get_seed(s);
  c.replications = static_cast<int>(get_positive(s, "replications"));
  c.n_train = get_positive(s, "n_train");
  c.n_test = get_positive(s, "n_test");
  c.decay = get_double(s, "decay");
  c.hyper.rho_l2 = get_double(s, "rho");
  c.hyper.lambda_l1 = get_double(s, "lambda_l1");
  c.hyper.lambda_fcp = get_double(s, "lambda");
  c.hyper.a_fcp = get_double(s, "a");
  c.hyper.a_safety = get_double(s, "a_safety");
  c.hyper.gamma_hat = get_double(s, "gamma_hat");
  c.hyper.alpha_hat_scale = get_double(s, "alpha_hat");
  c.hyper.smoothing_delta = get_double(s, "smoothing_delta");
  c.hyper.solver_max_iter = static_cast<std::size_t>(get_positive(s, "max_iter"));
  if (!(c.hyper.rho_l2 > 0.0) || !(c.hyper.lambda_l1 > 0.0) || !(c.hyper.lambda_fcp > 0.0) ||
      !(c.hyper.a_fcp > 0.0) || !(c.hyper.gamma_hat > 0.0))
    throw usage_error("rho, lambda_l1, lambda, a and gamma_hat must be positive");
  if (!(c.hyper.a_safety > 0.0 && c.hyper.a_safety < 1.0))
    throw usage_error("a_safety must lie in (0, 1)");
  for (double p : get_list(s, "p_grid")) {
    if (!(p >= 1.0) || p != static_cast<double>(static_cast<Eigen::Index>(p)))
      throw usage_error("p_grid entries must be positive integers");
    plan.p_grid.push_back(static_cast<Eigen::Index>(p));
  }
  try {
    for (Eigen::Index p : plan.p_grid) {
      SimConfig probe = c;
      probe.p = p;
      probe.validate();
    }
  } catch (const std::invalid_argument &e) {
    throw usage_error(e.what());
  }
  return plan;
}

inline int cmd_svm_bench(const RunManifest &m, std::ostream &log = std::cerr) {
  const Settings s = resolve_settings(m);
  const SvmBenchPlan plan = plan_svm_bench(s);
  const auto dir = detail::prepare_output(m.output_path);

  const BenchmarkReport rep = run_benchmark(plan.sim, plan.p_grid, m.threads);

  std::ostringstream detail_out, summary_out;
  csv::Writer dw(detail_out), sw(summary_out);
  // The smoothed hinge is within mu/2 of the hinge for every sample.
  const std::string smoothing_meta =
      "smoothing_error_bound=" +
      csv::format_double(
          0.5 * SmoothingParams::from_sample_size(plan.sim.n_train, plan.sim.hyper.smoothing_delta).mu);
  detail::write_header(dw, m.command, s);
  dw.meta(smoothing_meta);
  dw.header({"variant", "p", "replication", "seed", "test_error", "iterations", "objective",
             "effective_a"});
  for (const auto &r : rep.records) {
    dw.cell(std::string(to_string(r.variant))).cell(r.p).cell(r.replication).cell(r.seed);
    if (r.ok)
      dw.cell(r.test_error);
    else
      dw.cell(std::string("nan"));
    dw.cell(r.iterations).cell(r.objective).cell(r.effective_a).end();
  }
  detail::write_header(sw, m.command, s);
  sw.meta(smoothing_meta);
  sw.header({"variant", "p", "mean", "se"});
  for (const auto &row : rep.rows)
    sw.cell(std::string(to_string(row.variant)))
        .cell(row.p)
        .cell(row.mean_error_percent)
        .cell(row.se_percent)
        .end();
  detail::write_file(dir / "svm_bench.csv", detail_out.str());
  detail::write_file(dir / "svm_bench_summary.csv", summary_out.str());

  int failed = 0;
  for (const auto &r : rep.records)
    if (!r.ok) {
      ++failed;
      log << "replication failed: " << to_string(r.variant) << " p=" << r.p
          << " rep=" << r.replication << ": " << r.failure << '\n';
    }
  return failed ? exit_partial : exit_ok;
}

struct NnPlan {
  NNExperimentConfig cfg;
  int replications = 0;
  std::vector<double> levels;
};

inline NnPlan plan_nn_train(const Settings &s) {
  using namespace detail;
  NnPlan plan;
  NNExperimentConfig &c = plan.cfg;
  std::vector<int> widths{c.arch.input_size()};
  for (double h : get_list(s, "hidden")) {
    if (!(h >= 1.0) || h != static_cast<double>(static_cast<int>(h)))
      throw usage_error("hidden layer widths must be positive integers");
    widths.push_back(static_cast<int>(h));
  }
  widths.push_back(1);
  try {
    c.arch = MLPArchitecture(widths);
  } catch (const std::invalid_argument &e) {
    throw usage_error(e.what());
  }
  c.seed = get_seed(s);
  c.n_train = get_positive(s, "n_train");
  c.n_test = get_positive(s, "n_test");
  c.noise_sd = get_double(s, "noise_sd");
  c.init_sd = get_double(s, "init_sd");
  c.lambda = get_double(s, "lambda");
  c.a_scale = get_double(s, "a");
  c.gamma_hat = get_double(s, "gamma_hat");
  c.alpha_hat_scale = get_double(s, "alpha_hat");
  c.max_iter = static_cast<std::size_t>(get_positive(s, "max_iter"));
  c.lipschitz.box_radius = get_double(s, "lipschitz_box");
  c.lipschitz.pairs = static_cast<int>(get_positive(s, "lipschitz_pairs"));
  plan.replications = static_cast<int>(get_positive(s, "replications"));
  plan.levels = get_list(s, "levels");
  if (!(c.gamma_hat > 0.0) || !(c.lipschitz.box_radius > 0.0))
    throw usage_error("gamma_hat and lipschitz_box must be positive");
  for (std::size_t i = 0; i < plan.levels.size(); ++i) {
    const double r = plan.levels[i];
    if (!(r >= 0.0 && r < 1.0) || (i > 0 && !(r < plan.levels[i - 1])))
      throw usage_error("levels must be strictly decreasing fractions in [0, 1)");
  }
  try {
    c.validate();
  } catch (const std::invalid_argument &e) {
    throw usage_error(e.what());
  }
  return plan;
}

inline int cmd_nn_train(const RunManifest &m, std::ostream &log = std::cerr) {
  const Settings s = resolve_settings(m);
  const NnPlan plan = plan_nn_train(s);
  const auto dir = detail::prepare_output(m.output_path);

  const TrendReport rep = consistency_trend(plan.cfg, plan.replications, m.threads, plan.levels);

  std::ostringstream sweep_out, trend_out;
  csv::Writer w(sweep_out), t(trend_out);
  detail::write_header(w, m.command, s);
  w.header({"objective", "test_mse", "replication", "level", "iteration"});
  for (const auto &r : rep.replications)
    for (std::size_t l = 0; l < r.sweep.size(); ++l) {
      const auto &pt = r.sweep[l];
      if (!pt.reached)
        continue;
      w.cell(pt.objective).cell(pt.test_mse).cell(r.replication).cell(l).cell(pt.iteration).end();
    }
  detail::write_header(t, m.command, s);
  t.meta("spearman=" + csv::format_double(rep.spearman));
  t.meta("exclusion_zone_ok=" + std::to_string(rep.exclusion_ok) + "/" +
         std::to_string(rep.replications.size()));
  t.header({"level", "median_objective", "median_test_mse", "reached"});
  for (std::size_t l = 0; l < rep.levels.size(); ++l)
    t.cell(l)
        .cell(rep.levels[l].median_objective)
        .cell(rep.levels[l].median_test_mse)
        .cell(rep.levels[l].reached)
        .end();
  detail::write_file(dir / "nn_sweep.csv", sweep_out.str());
  detail::write_file(dir / "nn_trend.csv", trend_out.str());

  int failed = 0;
  for (const auto &r : rep.replications)
    if (!r.ok()) {
      ++failed;
      log << "replication " << r.replication << " failed: "
          << (r.failure.empty() ? to_string(r.fit.solver.terminated_by) : r.failure) << '\n';
    }
  return failed ? exit_partial : exit_ok;
}

/// Loss, penalty and data shared by `solve` and `check`.
struct Problem {
  DatasetPtr data;
  std::vector<std::string> features;
  std::string loss_name;
  double lambda = 0.0;
  double rho = 0.0;
  SmoothingParams smoothing;
};

inline Problem load_problem(const Settings &s) {
  using namespace detail;
  Problem pr;
  const std::string input = s.at("input");
  if (input.empty())
    throw usage_error("an input CSV is required (--input)");
  csv::Table t;
  try {
    t = csv::read_numeric_file(input);
  } catch (const csv::parse_error &e) {
    throw usage_error(std::string("parse error: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw usage_error(e.what());
  }
  std::size_t ycol;
  try {
    ycol = t.column(s.at("response"));
  } catch (const std::invalid_argument &e) {
    throw usage_error(input + ": " + e.what());
  }
  if (t.rows.empty())
    throw usage_error(input + ": no data rows");
  if (t.header.size() < 2)
    throw usage_error(input + ": need at least one feature column");
  const Eigen::Index n = static_cast<Eigen::Index>(t.rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(t.header.size() - 1);
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      const double v = t.rows[static_cast<std::size_t>(i)][j];
      if (!std::isfinite(v))
        throw usage_error(input + ": non-finite value in row " + std::to_string(i + 1));
      if (j == ycol)
        y[i] = v;
      else
        X(i, col++) = v;
    }
  }
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (j != ycol)
      pr.features.push_back(t.header[j]);

  pr.loss_name = s.at("loss");
  pr.lambda = get_double(s, "lambda");
  pr.rho = get_double(s, "rho");
  if (!(pr.lambda > 0.0))
    throw usage_error("lambda must be positive");
  if (!(pr.rho >= 0.0))
    throw usage_error("rho must be non-negative");
  try {
    if (pr.loss_name == "squared") {
      pr.data = make_dataset(std::move(X), std::move(y), DataKind::regression);
    } else if (pr.loss_name == "smoothed_hinge") {
      pr.data = make_dataset(std::move(X), std::move(y), DataKind::classification);
      pr.smoothing = SmoothingParams::from_sample_size(n, get_double(s, "smoothing_delta"));
    } else {
      throw usage_error("loss must be 'squared' or 'smoothed_hinge'");
    }
  } catch (const usage_error &) {
    throw;
  } catch (const std::invalid_argument &e) {
    throw usage_error(input + ": " + e.what());
  }
  return pr;
}

/// Calls `f(loss)` with the concrete loss object.
template <class F> decltype(auto) with_loss(const Problem &pr, F &&f) {
  if (pr.loss_name == "squared")
    return f(SquaredLoss(pr.data));
  return f(SmoothedSvmLoss(pr.data, pr.rho, pr.smoothing));
}

/// a defaults to 0.5/M; an explicit a must satisfy a < 1/M.
inline PenaltyParams resolve_penalty(const Settings &s, const Problem &pr, double M) {
  const auto a = detail::get_auto(s, "a");
  if (a && !(*a > 0.0 && *a < 1.0 / M))
    throw usage_error("a must lie in (0, 1/M) with M = " + csv::format_double(M));
  return PenaltyParams(pr.lambda, a ? *a : 0.5 / M);
}

inline std::string certificate_line(const S3oncCertificate &c, std::size_t iterations) {
  return "certificate residual=" + csv::format_double(c.first_order_residual) +
         " tolerance=" + csv::format_double(c.tolerance) +
         " exclusion_zone_ok=" + (c.exclusion_zone_ok ? "true" : "false") +
         " iterations=" + std::to_string(iterations) + " " +
         (c.passes() ? "PASS" : "FAIL");
}

inline int cmd_solve(const RunManifest &m, std::ostream &out = std::cout) {
  const Settings s = resolve_settings(m);
  const Problem pr = load_problem(s);
  const std::string init = s.at("init");
  if (init != "zero" && init != "lasso")
    throw usage_error("init must be 'zero' or 'lasso'");
  const double gamma_hat = detail::get_double(s, "gamma_hat");
  const long long max_iter = detail::get_int(s, "max_iter");
  if (max_iter < 0)
    throw usage_error("max_iter must be non-negative");

  return with_loss(pr, [&](const auto &loss) {
    const double M = loss.lipschitz_bound();
    const PenaltyParams pen = resolve_penalty(s, pr, M);
    const auto alpha = detail::get_auto(s, "alpha_hat");
    std::optional<SolverConfig> scfg;
    try {
      scfg.emplace(gamma_hat, alpha ? *alpha : 1.0 / M, M, static_cast<std::size_t>(max_iter));
    } catch (const std::invalid_argument &e) {
      throw usage_error(e.what());
    }
    const auto dir = detail::prepare_output(m.output_path);

    Eigen::VectorXd beta0 = Eigen::VectorXd::Zero(loss.dimension());
    if (init == "lasso")
      beta0 = solve_lasso(loss, pen.lambda(), LassoConfig{}, beta0).beta;
    const SolverResult res = run(loss, pen, *scfg, beta0);
    const S3oncCertificate cert =
        s3onc_certificate(res.beta, loss.gradient(res.beta), pen, gamma_hat);

    std::ostringstream sol, crt;
    csv::Writer w(sol), c(crt);
    detail::write_header(w, m.command, s);
    w.meta("M=" + csv::format_double(M));
    w.meta("effective_a=" + csv::format_double(pen.a()));
    w.header({"index", "beta"});
    for (Eigen::Index j = 0; j < res.beta.size(); ++j)
      w.cell(j).cell(res.beta[j]).end();
    detail::write_header(c, m.command, s);
    c.header({"residual", "tolerance", "exclusion_zone_ok", "iterations", "objective",
              "terminated_by", "passes"});
    c.cell(cert.first_order_residual)
        .cell(cert.tolerance)
        .cell(std::string(cert.exclusion_zone_ok ? "true" : "false"))
        .cell(res.iterations)
        .cell(res.objective_trace.back())
        .cell(std::string(to_string(res.terminated_by)))
        .cell(std::string(cert.passes() ? "true" : "false"))
        .end();
    detail::write_file(dir / "solution.csv", sol.str());
    detail::write_file(dir / "certificate.csv", crt.str());
    out << certificate_line(cert, res.iterations) << '\n';
    return cert.passes() ? int(exit_ok) : int(exit_certificate);
  });
}

/// Reads a coefficient vector: a `beta` column if present, else the last column.
inline Eigen::VectorXd load_beta(const std::string &path) {
  if (path.empty())
    throw usage_error("a coefficient CSV is required (--beta)");
  csv::Table t;
  try {
    t = csv::read_numeric_file(path);
  } catch (const csv::parse_error &e) {
    throw usage_error(std::string("parse error: ") + e.what());
  } catch (const std::invalid_argument &e) {
    throw usage_error(e.what());
  }
  const auto it = std::find(t.header.begin(), t.header.end(), "beta");
  const std::size_t col = it != t.header.end() ? static_cast<std::size_t>(it - t.header.begin())
                                               : t.header.size() - 1;
  Eigen::VectorXd b(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    b[static_cast<Eigen::Index>(i)] = t.rows[i][col];
  if (!b.allFinite())
    throw usage_error(path + ": coefficients must be finite");
  return b;
}

inline int cmd_check(const RunManifest &m, std::ostream &out = std::cout) {
  const Settings s = resolve_settings(m);
  const Problem pr = load_problem(s);
  const Eigen::VectorXd beta = load_beta(s.at("beta"));
  const double tol = detail::get_double(s, "gamma_hat");
  if (!(tol > 0.0))
    throw usage_error("gamma_hat must be positive");
  if (beta.size() != static_cast<Eigen::Index>(pr.features.size()))
    throw usage_error("beta has " + std::to_string(beta.size()) + " entries but the input has " +
                      std::to_string(pr.features.size()) + " features");

  return with_loss(pr, [&](const auto &loss) {
    const double M = loss.lipschitz_bound();
    const PenaltyParams pen = resolve_penalty(s, pr, M);
    const auto dir = detail::prepare_output(m.output_path);
    const S3oncCertificate cert = check_s3onc(beta, loss, pen, tol);

    std::ostringstream o;
    csv::Writer w(o);
    detail::write_header(w, m.command, s);
    w.meta("M=" + csv::format_double(M));
    w.meta("effective_a=" + csv::format_double(pen.a()));
    w.header({"residual", "tolerance", "exclusion_zone_ok", "passes"});
    w.cell(cert.first_order_residual)
        .cell(cert.tolerance)
        .cell(std::string(cert.exclusion_zone_ok ? "true" : "false"))
        .cell(std::string(cert.passes() ? "true" : "false"))
        .end();
    detail::write_file(dir / "check.csv", o.str());
    out << certificate_line(cert, 0) << '\n';
    return cert.passes() ? int(exit_ok) : int(exit_certificate);
  });
}

/// Dispatches and maps errors to exit codes.
inline int execute(const RunManifest &m, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
  try {
    switch (m.command) {
    case Command::svm_bench: return cmd_svm_bench(m, err);
    case Command::nn_train: return cmd_nn_train(m, err);
    case Command::solve: return cmd_solve(m, out);
    case Command::check: return cmd_check(m, out);
    }
  } catch (const usage_error &e) {
    err << "error: " << e.what() << '\n';
    return exit_invalid;
  } catch (const std::exception &e) {
    err << "failure: " << e.what() << '\n';
    return exit_partial;
  }
  return exit_invalid;
}

} // namespace fcp::cli
