// fcp: sparse learning with folded concave penalties from the command line.
//
//   fcp svm-bench [--p-grid 100,200,500] [--replications N] ...
//   fcp nn-train  [--replications N] [--lambda L] ...
//   fcp solve     --input data.csv [--loss squared|smoothed_hinge] ...
//   fcp check     --input data.csv --beta solution.csv ...

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcp/cli.hpp"

int main(int argc, char **argv) {
  using namespace fcp::cli;

  CLI::App app{"Sparse learning with the minimax concave penalty", "fcp"};
  app.set_version_flag("--version", std::string(FCP_VERSION));

  std::string command;
  app.add_option("command", command, "svm-bench | nn-train | solve | check")
      ->required()
      ->check(CLI::IsMember({"svm-bench", "nn-train", "solve", "check"}));

  RunManifest m;
  std::string config;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "flat key=value configuration file");
  auto *seed_opt = app.add_option("--seed", seed, "base random seed");
  app.add_option("--out", m.output_path, "output directory")->capture_default_str();
  app.add_option("--threads", m.threads, "worker threads for replications")
      ->capture_default_str();

  // Flags that map onto configuration keys of the same meaning.
  struct Mapped {
    const char *flag;
    const char *key;
    const char *help;
    std::string value;
  };
  std::vector<Mapped> mapped{
      {"--p-grid", "p_grid", "comma-separated dimensions (svm-bench)", {}},
      {"--replications", "replications", "replications per setting", {}},
      {"--lambda", "lambda", "MCP lambda", {}},
      {"--a", "a", "MCP a (svm-bench, solve, check) or a*M (nn-train)", {}},
      {"--rho", "rho", "ridge weight rho", {}},
      {"--alpha-hat", "alpha_hat", "step alpha_hat (solve) or alpha_hat*M (experiments)", {}},
      {"--gamma-hat", "gamma_hat", "target S3ONC accuracy", {}},
      {"--input", "input", "input CSV (solve, check)", {}},
      {"--beta", "beta", "coefficient CSV (check)", {}},
      {"--loss", "loss", "squared | smoothed_hinge (solve, check)", {}},
      {"--response", "response", "response column name (solve, check)", {}},
  };
  for (auto &f : mapped)
    app.add_option(f.flag, f.value, f.help);
  std::vector<std::string> sets;
  app.add_option("--set", sets, "extra key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_invalid;
  }

  try {
    m.command = parse_command(command);
    if (!config.empty())
      m.config_path = config;
    if (*seed_opt)
      m.seed = seed;
    for (const auto &s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0)
        throw usage_error("--set expects key=value, got '" + s + "'");
      m.overrides[s.substr(0, eq)] = s.substr(eq + 1);
    }
    for (const auto &f : mapped)
      if (app.count(f.flag))
        m.overrides[f.key] = f.value;
  } catch (const usage_error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return execute(m);
}
