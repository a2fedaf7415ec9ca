#include "defopt/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "defopt/barrier.hpp"
#include "defopt/csv.hpp"
#include "defopt/descent.hpp"
#include "defopt/kernels.hpp"
#include "defopt/study.hpp"

namespace defopt {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + s + "'");
  }
}

int parse_int(const std::string& key, const std::string& s) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

ScalarField load_field(const std::string& source, const Grid& g, const char* what) {
  if (source.empty())
    throw std::invalid_argument(std::string(what) + ": no field source given");
  if (is_builtin_field(source)) return builtin_field(source, g);
  if (!std::filesystem::exists(source))
    throw std::invalid_argument(std::string(what) + ": '" + source +
                                "' is neither a built-in field nor an existing CSV file");
  return read_field_csv(source, g);
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file " + path.string());
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    cfg.apply_override(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
  if (key == "n") n = parse_int(key, value);
  else if (key == "phi") phi = value;
  else if (key == "mu") mu = parse_double(key, value);
  else if (key == "lambda") lambda = parse_double(key, value);
  else if (key == "target") target = value;
  else if (key == "v_lower") v_lower = value;
  else if (key == "v_upper") v_upper = value;
  else if (key == "grad_tol") grad_tol = parse_double(key, value);
  else if (key == "outer_tol") outer_tol = parse_double(key, value);
  else if (key == "cg_tol") cg_tol = parse_double(key, value);
  else if (key == "max_iters") max_iters = parse_int(key, value);
  else if (key == "max_outer") max_outer = parse_int(key, value);
  else if (key == "barrier_init") barrier_init = parse_double(key, value);
  else if (key == "lambda_sweep") lambda_sweep = parse_list(key, value);
  else if (key == "out") out = value;
  else if (key == "warm_u") warm_u = value;
  else if (key == "warm_v") warm_v = value;
  else if (key == "seed") seed = static_cast<unsigned long>(parse_int(key, value));
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

Nonlinearity RunConfig::parse_phi() const {
  if (phi == "shifted_cubic") return Nonlinearity::shifted_cubic();
  if (phi.rfind("affine:", 0) == 0) {
    const std::vector<double> c = parse_list("phi", phi.substr(7));
    if (c.size() != 2)
      throw std::invalid_argument("phi: affine takes exactly two coefficients");
    return Nonlinearity::affine(c[0], c[1]);
  }
  if (phi.rfind("polynomial:", 0) == 0)
    return Nonlinearity::polynomial(parse_list("phi", phi.substr(11)));
  throw std::invalid_argument("phi: expected affine:c0,c1 | shifted_cubic | polynomial:...");
}

ProblemSpec RunConfig::to_problem(bool constrained) const {
  if (n < 2) throw std::invalid_argument("resolution must be >= 2");
  ProblemSpec spec;
  spec.grid = build_grid(n);
  spec.target = load_field(target, spec.grid, "target");
  spec.phi = parse_phi();
  spec.mu = mu;
  spec.lambda = lambda;
  spec.constrained = constrained;
  spec.linear_solver.tol = cg_tol;
  if (constrained) {
    if (v_lower.empty() || v_upper.empty())
      throw std::invalid_argument("constrained solve needs v_lower and v_upper");
    spec.v_lower = load_field(v_lower, spec.grid, "v_lower");
    spec.v_upper = load_field(v_upper, spec.grid, "v_upper");
  }
  spec.validate();
  return spec;
}

std::optional<std::pair<ScalarField, ScalarField>> RunConfig::warm_start(const Grid& g) const {
  if (warm_u.empty() && warm_v.empty()) return std::nullopt;
  ScalarField u = warm_u.empty() ? ScalarField(g) : load_field(warm_u, g, "warm_u");
  ScalarField v = warm_v.empty() ? ScalarField(g) : load_field(warm_v, g, "warm_v");
  return std::make_pair(std::move(u), std::move(v));
}

namespace {

DescentOptions descent_options(const RunConfig& cfg) {
  DescentOptions opts;
  opts.grad_tol = cfg.grad_tol;
  opts.max_iters = cfg.max_iters;
  return opts;
}

void write_summary(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream os(path);
  for (const auto& [k, v] : rows) os << k << '=' << v << '\n';
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

int cmd_solve(const RunConfig& config) {
  try {
    const ProblemSpec spec = config.to_problem(false);
    const DescentOptions opts = descent_options(config);
    opts.validate();
    const auto init = config.warm_start(spec.grid);

    const DescentResult result = run_descent(spec, opts, init ? &*init : nullptr);
    const SpdMatrix K = assemble_stiffness(spec.grid);
    const KktResidual kkt =
        kkt_residual(result.state.u, result.state.v, result.state.w, spec, K);

    std::filesystem::create_directories(config.out);
    write_field_csv(config.out / "u.csv", result.state.u);
    write_field_csv(config.out / "v.csv", result.state.v);
    write_field_csv(config.out / "w.csv", result.state.w);
    write_run_report_csv(config.out / "log.csv", result.report);

    const bool converged = result.state.stop == StopReason::converged;
    const char* status = converged ? "converged"
                         : result.state.stop == StopReason::iteration_limit
                             ? "iteration_limit"
                             : "degenerate_direction";
    write_summary(config.out / "summary.txt",
                  {{"status", status},
                   {"iterations", std::to_string(result.state.iter)},
                   {"cost", fmt(result.state.cost)},
                   {"residual_h1", fmt(result.state.residual_h1)},
                   {"grad_norm", fmt(std::sqrt(result.state.grad_norm_sq))},
                   {"kkt_stationarity_u", fmt(kkt.stationarity_u)},
                   {"kkt_stationarity_v", fmt(kkt.stationarity_v)}});

    std::cout << "status " << status << " after " << result.state.iter << " iterations\n"
              << "cost " << fmt(result.state.cost) << "\n"
              << "residual_h1 " << fmt(result.state.residual_h1) << "\n"
              << "kkt residuals " << fmt(kkt.stationarity_u) << " " << fmt(kkt.stationarity_v)
              << "\n"
              << "fields written to " << config.out.string() << "\n";
    return converged ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_solve_constrained(const RunConfig& config) {
  try {
    const ProblemSpec spec = config.to_problem(true);
    const DescentOptions opts = descent_options(config);
    opts.validate();
    const BarrierMultipliers init =
        BarrierMultipliers::constant(spec.grid, config.barrier_init);

    const OuterProgress progress = [](const OuterRecord& rec) {
      if (rec.outer_iter == 1 || rec.outer_iter % 500 == 0)
        std::cerr << "outer " << rec.outer_iter << ": certificates (" << rec.cert_state
                  << ", " << rec.cert_lower << ", " << rec.cert_upper << "), max violation u "
                  << rec.max_violation_u << ", inner " << rec.inner_iters << "\n";
    };
    const BarrierResult result =
        run_barrier(spec, opts, config.outer_tol, config.max_outer, &init, progress);

    std::filesystem::create_directories(config.out);
    write_field_csv(config.out / "u.csv", result.state.u);
    write_field_csv(config.out / "v.csv", result.state.v);
    write_field_csv(config.out / "w.csv", result.state.w);
    write_field_csv(config.out / "cert_a.csv", result.certificates.state_product);
    write_field_csv(config.out / "cert_bm.csv", result.certificates.lower_product);
    write_field_csv(config.out / "cert_bp.csv", result.certificates.upper_product);
    write_outer_log_csv(config.out / "outer_log.csv", result.outer_log);

    const OuterRecord& last = result.outer_log.back();
    write_summary(config.out / "summary.txt",
                  {{"status", result.converged ? "converged" : "iteration_limit"},
                   {"outer_iterations", std::to_string(last.outer_iter)},
                   {"cost", fmt(last.cost)},
                   {"cert_state", fmt(last.cert_state)},
                   {"cert_lower", fmt(last.cert_lower)},
                   {"cert_upper", fmt(last.cert_upper)},
                   {"max_violation_u", fmt(last.max_violation_u)},
                   {"max_violation_v", fmt(last.max_violation_v)}});

    std::cout << "status " << (result.converged ? "converged" : "iteration_limit") << " after "
              << last.outer_iter << " outer iterations\n"
              << "certificates " << fmt(last.cert_state) << " " << fmt(last.cert_lower) << " "
              << fmt(last.cert_upper) << "\n"
              << "max constraint violation u " << fmt(last.max_violation_u) << ", v "
              << fmt(last.max_violation_v) << "\n"
              << "fields written to " << config.out.string() << "\n";
    return result.converged ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_continuation(const RunConfig& config) {
  try {
    if (config.lambda_sweep.empty())
      throw std::invalid_argument("lambda_sweep must list at least one value");
    const ProblemSpec spec = config.to_problem(false);
    const DescentOptions opts = descent_options(config);
    opts.validate();

    const ContinuationResult result = run_continuation(spec, config.lambda_sweep, opts);

    std::filesystem::create_directories(config.out);
    write_continuation_csv(config.out / "continuation.csv", result);
    if (result.oracle) {
      write_field_csv(config.out / "oracle_u.csv", result.oracle->u);
      write_field_csv(config.out / "oracle_v.csv", result.oracle->v);
    }
    bool all_converged = true;
    std::cout << "lambda residual_h1 weighted dist_u\n";
    for (const ContinuationEntry& e : result.entries) {
      all_converged = all_converged && e.converged;
      std::cout << fmt(e.lambda) << ' ' << fmt(e.residual_h1) << ' '
                << fmt(e.weighted_residual) << ' '
                << (e.dist_u_oracle ? fmt(*e.dist_u_oracle) : std::string("-")) << '\n';
    }
    std::cout << "sweep written to " << (config.out / "continuation.csv").string() << "\n";
    return all_converged ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_check(const RunConfig& config) {
  try {
    const Nonlinearity phi = config.parse_phi();
    const Interval range{-10.0, 10.0};
    const int samples = 2001;

    // small witness grid for the affine comparison function l
    const std::vector<std::pair<double, double>> witnesses = [&] {
      std::vector<std::pair<double, double>> w{{0.0, 0.0}};
      const auto& c = phi.coeffs();
      w.emplace_back(c.size() > 1 ? c[1] : 0.0, c[0]);  // phi's own affine part
      for (double slope : {-1.0, 0.0, 1.0})
        for (double icept : {-1.0, 0.0, 1.0}) w.emplace_back(slope, icept);
      return w;
    }();

    bool holds = false;
    double best_max = 0.0;
    std::pair<double, double> witness{0.0, 0.0};
    for (const auto& [slope, icept] : witnesses) {
      const ExistenceReport rep = check_existence_hypothesis(phi, slope, icept, range, samples);
      if (rep.holds) {
        holds = true;
        best_max = rep.max_value;
        witness = {slope, icept};
        break;
      }
    }

    std::cout << "phi = " << phi.describe() << "\n";
    if (holds)
      std::cout << "existence hypothesis holds with l(u) = " << fmt(witness.second)
                << (witness.first != 0.0 ? " + " + fmt(witness.first) + "*u" : "")
                << ", sampled max of (l(u)-phi(u))u on [" << range.lo << "," << range.hi
                << "] = " << fmt(best_max) << "\n";
    else
      std::cout << "existence hypothesis fails: (l(u)-phi(u))u unbounded above for all "
                   "tested affine l\n";

    const bool monotone = check_monotone(phi, range, samples);
    std::cout << "phi is " << (monotone ? "" : "NOT ")
              << "non-decreasing on the sampled range (asymptotic-limit hypothesis)\n";
    return holds ? 0 : 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace defopt
