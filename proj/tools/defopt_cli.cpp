#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "defopt/config.hpp"

namespace {

const std::vector<std::string> kConfigKeys = {
    "n",        "phi",        "mu",        "lambda",    "target",
    "v_lower",  "v_upper",    "grad_tol",  "outer_tol", "cg_tol",
    "max_iters", "max_outer", "barrier_init", "lambda_sweep", "out",
    "warm_u",   "warm_v",     "seed"};

struct SubcommandArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App* sub, SubcommandArgs& args) {
  sub->add_option("--config", args.config_path, "key=value configuration file");
  for (const std::string& key : kConfigKeys)
    sub->add_option("--" + key, args.overrides[key], "override config key '" + key + "'");
}

defopt::RunConfig build_config(const SubcommandArgs& args) {
  defopt::RunConfig cfg;
  if (!args.config_path.empty()) cfg = defopt::RunConfig::from_file(args.config_path);
  for (const std::string& key : kConfigKeys) {
    const auto it = args.overrides.find(key);
    if (it != args.overrides.end() && !it->second.empty())
      cfg.apply_override(key, it->second);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defect-regularized optimal control of elliptic PDEs"};
  app.require_subcommand(1);

  SubcommandArgs solve_args, constrained_args, continuation_args, check_args;
  CLI::App* solve = app.add_subcommand("solve", "unconstrained steepest-descent solve");
  add_config_options(solve, solve_args);
  CLI::App* constrained =
      app.add_subcommand("solve-constrained", "exponential-barrier solve with bounds");
  add_config_options(constrained, constrained_args);
  CLI::App* continuation =
      app.add_subcommand("continuation", "lambda sweep toward the exact state law");
  add_config_options(continuation, continuation_args);
  CLI::App* check = app.add_subcommand("check", "existence and monotonicity hypotheses");
  add_config_options(check, check_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return defopt::cmd_solve(build_config(solve_args));
    if (constrained->parsed())
      return defopt::cmd_solve_constrained(build_config(constrained_args));
    if (continuation->parsed())
      return defopt::cmd_continuation(build_config(continuation_args));
    if (check->parsed()) return defopt::cmd_check(build_config(check_args));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
