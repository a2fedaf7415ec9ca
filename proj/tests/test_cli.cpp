#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "defopt/config.hpp"
#include "defopt/csv.hpp"
#include "support.hpp"

using namespace defopt;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("defopt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> read_summary(const fs::path& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("file plus overrides") {
    const fs::path dir = temp_dir("cfg");
    const fs::path cfg = dir / "run.cfg";
    {
      std::ofstream os(cfg);
      os << "# paper linear case\n"
         << "n = 64\n"
         << "phi = affine:-1,0\n"
         << "mu = 1e-4\n"
         << "lambda = 1\n"
         << "target = minx\n"
         << "lambda_sweep = 1,10,100\n";
    }
    RunConfig c = RunConfig::from_file(cfg);
    CHECK(c.n == 64);
    CHECK(c.mu == doctest::Approx(1e-4));
    CHECK(c.target == "minx");
    REQUIRE(c.lambda_sweep.size() == 3);
    CHECK(c.lambda_sweep[2] == doctest::Approx(100.0));
    c.apply_override("n", "8");
    CHECK(c.n == 8);
    const Nonlinearity phi = c.parse_phi();
    CHECK(phi.is_affine());
    CHECK(phi.eval(3.0) == -1.0);
  }
  SUBCASE("unknown keys are hard errors") {
    RunConfig c;
    CHECK_THROWS_WITH_AS(c.apply_override("resolutionn", "8"),
                         "unknown config key 'resolutionn'", std::invalid_argument);
  }
  SUBCASE("malformed numbers are rejected with the key named") {
    RunConfig c;
    CHECK_THROWS_AS(c.apply_override("mu", "abc"), std::invalid_argument);
    CHECK_THROWS_AS(c.apply_override("n", "8.5"), std::invalid_argument);
    try {
      c.apply_override("grad_tol", "oops");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("grad_tol") != std::string::npos);
    }
  }
  SUBCASE("phi parsing") {
    RunConfig c;
    c.phi = "shifted_cubic";
    CHECK(c.parse_phi().eval(2.0) == 0.0);
    c.phi = "polynomial:1,0,2";
    CHECK(c.parse_phi().eval(2.0) == doctest::Approx(9.0));
    c.phi = "affine:1";
    CHECK_THROWS_AS(c.parse_phi(), std::invalid_argument);
    c.phi = "quartic";
    CHECK_THROWS_AS(c.parse_phi(), std::invalid_argument);
  }
}

TEST_CASE("builtin fields") {
  const Grid g = build_grid(4);
  const ScalarField minx = builtin_field("minx", g);
  CHECK(minx.at(1, 1) == doctest::Approx(0.25));
  CHECK(minx.at(2, 3) == doctest::Approx(0.5));
  CHECK(minx.at(3, 2) == doctest::Approx(0.25));
  const ScalarField sm = builtin_field("scaled_minx", g);
  CHECK(sm.at(2, 2) == doctest::Approx(0.25 * (0.5 - 0.25)));
  CHECK(sm.at(1, 1) == doctest::Approx(0.0).scale(1.0));
  const ScalarField c = builtin_field("constant:2.5", g);
  CHECK(c.at(3, 3) == 2.5);
  CHECK(builtin_field("zero", g).at(1, 2) == 0.0);
  CHECK_THROWS_AS(builtin_field("constant:x", g), std::invalid_argument);
  CHECK_THROWS_AS(builtin_field("nope", g), std::invalid_argument);
  CHECK(is_builtin_field("constant:-3"));
  CHECK(!is_builtin_field("fields/u.csv"));
}

TEST_CASE("field csv round trip") {
  const fs::path dir = temp_dir("csv");
  const Grid g = build_grid(9);
  const ScalarField f = testsup::random_field(g, 99, -5.0, 5.0);
  write_field_csv(dir / "f.csv", f);
  const ScalarField back = read_field_csv(dir / "f.csv", g);
  CHECK(testsup::max_abs_diff(f, back) < 1e-9);

  SUBCASE("wrong grid is rejected") {
    CHECK_THROWS(read_field_csv(dir / "f.csv", build_grid(8)));
  }
  SUBCASE("bad header is rejected") {
    std::ofstream os(dir / "bad.csv");
    os << "a,b,c\n1,2,3\n";
    os.close();
    CHECK_THROWS(read_field_csv(dir / "bad.csv", g));
  }
}

TEST_CASE("cmd_solve") {
  SUBCASE("trivial problem exits 0 at iteration zero") {
    const fs::path dir = temp_dir("solve_trivial");
    RunConfig c;
    c.n = 8;
    c.phi = "affine:0,0";
    c.target = "zero";
    c.out = dir / "out";
    CHECK(cmd_solve(c) == 0);
    const auto kv = read_summary(c.out / "summary.txt");
    CHECK(kv.at("status") == "converged");
    CHECK(kv.at("iterations") == "0");
    CHECK(std::stod(kv.at("cost")) == 0.0);
    CHECK(fs::exists(c.out / "u.csv"));
    CHECK(fs::exists(c.out / "v.csv"));
    CHECK(fs::exists(c.out / "w.csv"));
    CHECK(fs::exists(c.out / "log.csv"));
  }
  SUBCASE("invalid resolution exits 1") {
    RunConfig c;
    c.n = 1;
    CHECK(cmd_solve(c) == 1);
  }
  SUBCASE("iteration limit exits 2") {
    const fs::path dir = temp_dir("solve_limit");
    RunConfig c;
    c.n = 8;
    c.phi = "affine:-1,0";
    c.mu = 1e-3;
    c.target = "minx";
    c.max_iters = 2;
    c.out = dir / "out";
    CHECK(cmd_solve(c) == 2);
  }
  SUBCASE("identical configs give bitwise-identical fields") {
    const fs::path dir = temp_dir("solve_det");
    RunConfig c;
    c.n = 12;
    c.phi = "affine:-1,0";
    c.mu = 1e-2;
    c.target = "minx";
    c.grad_tol = 1e-6;
    c.max_iters = 5000;
    c.out = dir / "a";
    REQUIRE(cmd_solve(c) == 0);
    c.out = dir / "b";
    REQUIRE(cmd_solve(c) == 0);
    CHECK(slurp(dir / "a" / "u.csv") == slurp(dir / "b" / "u.csv"));
    CHECK(slurp(dir / "a" / "v.csv") == slurp(dir / "b" / "v.csv"));
    CHECK(slurp(dir / "a" / "log.csv") == slurp(dir / "b" / "log.csv"));
  }
  SUBCASE("a written field can be fed back as the target") {
    const fs::path dir = temp_dir("solve_roundtrip");
    const Grid g = build_grid(8);
    const ScalarField f = builtin_field("minx", g);
    write_field_csv(dir / "target.csv", f);
    RunConfig c;
    c.n = 8;
    c.phi = "affine:0,0";
    c.target = (dir / "target.csv").string();
    c.mu = 1e-2;
    c.max_iters = 4000;
    c.out = dir / "out";
    CHECK(cmd_solve(c) == 0);
  }
}

TEST_CASE("cmd_solve_constrained") {
  SUBCASE("missing bounds exit 1") {
    RunConfig c;
    c.n = 8;
    CHECK(cmd_solve_constrained(c) == 1);
  }
  SUBCASE("crossed bounds exit 1") {
    RunConfig c;
    c.n = 8;
    c.v_lower = "constant:2";
    c.v_upper = "constant:-2";
    CHECK(cmd_solve_constrained(c) == 1);
  }
  SUBCASE("small feasible run exits 0 and writes certificates") {
    const fs::path dir = temp_dir("constrained");
    RunConfig c;
    c.n = 8;
    c.phi = "affine:0,0";
    c.lambda = 1.0;
    c.target = "constant:-0.2";
    c.v_lower = "constant:-50";
    c.v_upper = "constant:50";
    c.grad_tol = 1e-7;
    c.max_iters = 20000;
    c.outer_tol = 1e-3;
    c.max_outer = 2000;
    c.out = dir / "out";
    CHECK(cmd_solve_constrained(c) == 0);
    const auto kv = read_summary(c.out / "summary.txt");
    CHECK(kv.at("status") == "converged");
    CHECK(std::stod(kv.at("cert_state")) <= 1e-3);
    CHECK(fs::exists(c.out / "cert_a.csv"));
    CHECK(fs::exists(c.out / "cert_bm.csv"));
    CHECK(fs::exists(c.out / "cert_bp.csv"));
    CHECK(fs::exists(c.out / "outer_log.csv"));
  }
}

TEST_CASE("cmd_continuation") {
  SUBCASE("empty sweep exits 1") {
    RunConfig c;
    c.n = 8;
    CHECK(cmd_continuation(c) == 1);
  }
  SUBCASE("descending sweep exits 1") {
    RunConfig c;
    c.n = 8;
    c.lambda_sweep = {10.0, 1.0};
    CHECK(cmd_continuation(c) == 1);
  }
  SUBCASE("single-lambda sweep runs and writes the csv") {
    const fs::path dir = temp_dir("cont");
    RunConfig c;
    c.n = 8;
    c.phi = "affine:-1,0";
    c.mu = 1e-2;
    c.target = "minx";
    c.grad_tol = 1e-6;
    c.max_iters = 20000;
    c.lambda_sweep = {1.0};
    c.out = dir / "out";
    CHECK(cmd_continuation(c) == 0);
    const std::string csv = slurp(c.out / "continuation.csv");
    CHECK(csv.find("lambda,cost,residual_h1,weighted_residual,dist_u_oracle,dist_v_oracle") == 0);
    CHECK(fs::exists(c.out / "oracle_u.csv"));
  }
}

TEST_CASE("cmd_check") {
  RunConfig c;
  c.phi = "affine:-1,0";
  CHECK(cmd_check(c) == 0);
  c.phi = "shifted_cubic";
  CHECK(cmd_check(c) == 0);
  c.phi = "polynomial:0,0,0,-1";
  CHECK(cmd_check(c) == 3);
  c.phi = "garbage";
  CHECK(cmd_check(c) == 1);
}

TEST_CASE("cli binary end to end") {
  const fs::path dir = temp_dir("cli_bin");
  const std::string bin = DEFOPT_CLI_PATH;
  REQUIRE(fs::exists(bin));
  auto run = [&](const std::string& args) {
    const std::string cmd = bin + " " + args + " > " + (dir / "stdout.txt").string() +
                            " 2> " + (dir / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("check --phi shifted_cubic") == 0);
  CHECK(run("check --phi polynomial:0,0,0,-1") == 3);
  CHECK(run("solve --n 1 --target zero --out " + (dir / "o1").string()) == 1);
  CHECK(run("solve --n 6 --phi affine:0,0 --target zero --out " + (dir / "o2").string()) == 0);
  CHECK(run("nonsense") == 1);
  // config file + override
  {
    std::ofstream os(dir / "c.cfg");
    os << "n = 6\nphi = affine:0,0\ntarget = zero\n";
  }
  CHECK(run("solve --config " + (dir / "c.cfg").string() + " --out " + (dir / "o3").string()) ==
        0);
  CHECK(fs::exists(dir / "o3" / "summary.txt"));
}
