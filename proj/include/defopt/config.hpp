#ifndef DEFOPT_CONFIG_HPP
#define DEFOPT_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "defopt/problem.hpp"

namespace defopt {

// Flat key=value run configuration; unknown keys are hard errors.
struct RunConfig {
  int n = 64;
  std::string phi = "affine:0,0";       // affine:c0,c1 | shifted_cubic | polynomial:c0,c1,...
  double mu = 0.0;
  double lambda = 1.0;
  std::string target = "zero";          // built-in name or CSV path
  std::string v_lower;                  // empty = absent
  std::string v_upper;
  double grad_tol = 1e-6;
  double outer_tol = 1e-3;
  double cg_tol = 1e-10;
  int max_iters = 5000;
  int max_outer = 5000;
  double barrier_init = 0.1;            // initial multiplier constant
  std::vector<double> lambda_sweep;
  std::filesystem::path out = "out";
  std::string warm_u;                   // optional CSV warm starts
  std::string warm_v;
  unsigned long seed = 0;               // test utilities only

  static RunConfig from_file(const std::filesystem::path& path);
  void apply_override(const std::string& key, const std::string& value);

  Nonlinearity parse_phi() const;
  ProblemSpec to_problem(bool constrained) const;
  std::optional<std::pair<ScalarField, ScalarField>> warm_start(const Grid& g) const;
};

// Subcommand bodies; return process exit codes:
// 0 success, 1 invalid input, 2 iteration limit, 3 advisory hypothesis failure.
int cmd_solve(const RunConfig& config);
int cmd_solve_constrained(const RunConfig& config);
int cmd_continuation(const RunConfig& config);
int cmd_check(const RunConfig& config);

}  // namespace defopt

#endif
