#include "defopt/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace defopt {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
  std::ofstream os = open_out(path);
  os << "x,y,value\n";
  const Grid& g = f.grid();
  for (int j = 1; j < g.n; ++j)
    for (int i = 1; i < g.n; ++i)
      os << fmt(g.x(i)) << ',' << fmt(g.y(j)) << ',' << fmt(f.at(i, j)) << '\n';
}

ScalarField read_field_csv(const std::filesystem::path& path, const Grid& g) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,y,value", 0) != 0)
    throw std::runtime_error(path.string() + ": expected header 'x,y,value'");
  ScalarField f(g);
  int row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (row >= g.m) throw std::runtime_error(path.string() + ": too many rows for the grid");
    std::istringstream ls(line);
    double x, y, value;
    char c1, c2;
    if (!(ls >> x >> c1 >> y >> c2 >> value) || c1 != ',' || c2 != ',')
      throw std::runtime_error(path.string() + ": malformed row " + std::to_string(row + 2));
    const int i = row % (g.n - 1) + 1;
    const int j = row / (g.n - 1) + 1;
    if (std::abs(x - g.x(i)) > 1e-9 || std::abs(y - g.y(j)) > 1e-9)
      throw std::runtime_error(path.string() + ": node coordinates do not match an n=" +
                               std::to_string(g.n) + " grid at row " + std::to_string(row + 2));
    f[row] = value;
    ++row;
  }
  if (row != g.m)
    throw std::runtime_error(path.string() + ": expected " + std::to_string(g.m) +
                             " rows, found " + std::to_string(row));
  return f;
}

void write_run_report_csv(const std::filesystem::path& path, const RunReport& report) {
  std::ofstream os = open_out(path);
  os << "iter,cost,grad_norm,eps,residual_h1\n";
  for (const IterationRecord& r : report)
    os << r.iter << ',' << fmt(r.cost) << ',' << fmt(r.grad_norm) << ',' << fmt(r.eps)
       << ',' << fmt(r.residual_h1) << '\n';
}

void write_outer_log_csv(const std::filesystem::path& path,
                         const std::vector<OuterRecord>& log) {
  std::ofstream os = open_out(path);
  os << "outer_iter,inner_iters,cost,cert_state,cert_lower,cert_upper,"
        "max_violation_u,max_violation_v\n";
  for (const OuterRecord& r : log)
    os << r.outer_iter << ',' << r.inner_iters << ',' << fmt(r.cost) << ','
       << fmt(r.cert_state) << ',' << fmt(r.cert_lower) << ',' << fmt(r.cert_upper) << ','
       << fmt(r.max_violation_u) << ',' << fmt(r.max_violation_v) << '\n';
}

void write_continuation_csv(const std::filesystem::path& path,
                            const ContinuationResult& result) {
  std::ofstream os = open_out(path);
  os << "lambda,cost,residual_h1,weighted_residual,dist_u_oracle,dist_v_oracle\n";
  for (const ContinuationEntry& e : result.entries) {
    os << fmt(e.lambda) << ',' << fmt(e.cost) << ',' << fmt(e.residual_h1) << ','
       << fmt(e.weighted_residual) << ',';
    if (e.dist_u_oracle) os << fmt(*e.dist_u_oracle);
    os << ',';
    if (e.dist_v_oracle) os << fmt(*e.dist_v_oracle);
    os << '\n';
  }
}

bool is_builtin_field(const std::string& name) {
  return name == "minx" || name == "scaled_minx" || name == "zero" ||
         name.rfind("constant:", 0) == 0;
}

ScalarField builtin_field(const std::string& name, const Grid& g) {
  ScalarField f(g);
  if (name == "zero") return f;
  if (name == "minx") {
    for (int j = 1; j < g.n; ++j)
      for (int i = 1; i < g.n; ++i)
        f.at(i, j) = std::min(g.x(i), 1.0 - g.x(i));
    return f;
  }
  if (name == "scaled_minx") {
    // 0.25*(min(x,1-x) - 0.25)
    for (int j = 1; j < g.n; ++j)
      for (int i = 1; i < g.n; ++i)
        f.at(i, j) = 0.25 * (std::min(g.x(i), 1.0 - g.x(i)) - 0.25);
    return f;
  }
  if (name.rfind("constant:", 0) == 0) {
    std::size_t pos = 0;
    const std::string arg = name.substr(9);
    double value = 0.0;
    try {
      value = std::stod(arg, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad constant field '" + name + "'");
    }
    if (pos != arg.size()) throw std::invalid_argument("bad constant field '" + name + "'");
    for (int p = 0; p < g.m; ++p) f[p] = value;
    return f;
  }
  throw std::invalid_argument("unknown built-in field '" + name + "'");
}

}  // namespace defopt
