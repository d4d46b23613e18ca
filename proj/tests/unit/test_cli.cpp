// Copyright 2026 The nehari-dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nehari/field_io.hpp"

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

fs::path workdir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "nehari_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Runs the CLI with `args`, stderr captured to dir/stderr.txt; returns the exit code.
int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = std::string("\"") + NEHARI_CLI + "\" " + args + " > \"" + (dir / "stdout.txt").string() +
                          "\" 2> \"" + (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// CSV data rows with '#' preamble lines and the header removed.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    std::vector<std::string> cells(1);
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
      const char ch = line[k];
      if (quoted) {
        if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
          cells.back() += '"';
          ++k;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cells.back() += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.emplace_back();
      } else {
        cells.back() += ch;
      }
    }
    rows.push_back(cells);
  }
  return rows;
}

std::string small_config(const fs::path& dir, const std::string& extra = "") {
  const fs::path p = dir / "cfg.ini";
  std::ofstream os(p);
  os << "[chart]\ndim = 1\nsizes = 32\n[exponents]\np = 3\nq = 2\n[problem]\nlambda = 0.05\nbeta = 4\n"
     << "[constants]\ntrials = 100\n[verify]\ntrials = 40\nderivative_trials = 5\n[output]\ndir = "
     << (dir / "out").string() << "\n"
     << extra;
  return p.string();
}

TEST(Cli, ProjectStoredSineFieldGivesGoldenRoot) {
  const fs::path dir = workdir("project");
  const std::size_t n = 64;
  const double h = 1.0 / n;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = std::sin(2 * kPi * static_cast<double>(i) * h);
  // five integrals of the stored field, central differences by hand
  auto integrals = [&](const std::vector<double>& v, double& A, double& B, double& C, double& D, double& E) {
    A = B = C = D = E = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double g = std::abs((v[(i + 1) % n] - v[(i + n - 1) % n]) / (2 * h)), a = std::abs(v[i]);
      A += g * g * g * h;
      B += g * g * h;
      C += a * a * h;
      D += a * a * a * h;
      E += a * a * a * a * h;
    }
  };
  double A, B, C, D, E;
  integrals(u, A, B, C, D, E);
  const double s = std::cbrt(1.0 / (A + D));
  for (double& x : u) x *= s;
  integrals(u, A, B, C, D, E);
  // mu B - lambda C = 1 with mu = 1, and a E = 1
  const double mu = 1.0, lambda = (B - 1.0) / C, a = 1.0 / E;
  double lam = lambda, m = mu;
  if (!(lam > 0.0)) {
    lam = 0.1;
    m = (1.0 + lam * C) / B;
  }

  nehari::FieldFile f;
  f.dim = 1;
  f.sizes = {n};
  f.values = u;
  {
    std::ofstream os(dir / "sine.field");
    nehari::write_field_file(os, f);
  }
  {
    std::ofstream os(dir / "cfg.ini");
    os << "[chart]\ndim = 1\nsizes = 64\n[exponents]\np = 3\nq = 2\n[weight]\nmu = " << g17(m)
       << "\n[problem]\nlambda = " << g17(lam) << "\nbeta = 4\na = " << g17(a)
       << "\n[constants]\ntrials = 100\n[output]\ndir = " << (dir / "out").string() << "\n";
  }
  ASSERT_EQ(run_cli(dir, "--config " + (dir / "cfg.ini").string() + " project --field " + (dir / "sine.field").string()),
            0)
      << slurp(dir / "stderr.txt");
  const auto rows = csv_rows(dir / "out" / "project.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(std::stod(rows[0][1]), (1.0 + std::sqrt(5.0)) / 2.0, 1e-9);
  EXPECT_EQ(rows[0][2], "Minus");
  EXPECT_TRUE(fs::exists(dir / "out" / "projected_0.field"));
}

TEST(Cli, VerifyPassesOnSmallConfig) {
  const fs::path dir = workdir("verify");
  ASSERT_EQ(run_cli(dir, "--config " + small_config(dir) + " verify"), 0) << slurp(dir / "stderr.txt");
  const auto rows = csv_rows(dir / "out" / "verify.csv");
  ASSERT_FALSE(rows.empty());
  bool sandwich = false;
  for (const auto& r : rows) {
    ASSERT_EQ(r.size(), 6u) << r[0];
    EXPECT_EQ(r[5], "true") << r[0];
    sandwich = sandwich || r[0] == "modular_q sandwich min(rho^1/e-, rho^1/e+) <= norm";
  }
  EXPECT_TRUE(sandwich);
  const std::string csv = slurp(dir / "out" / "verify.csv");
  EXPECT_NE(csv.find("property,seed,lhs,rhs,margin,pass"), std::string::npos);
  EXPECT_EQ(csv.rfind("# seed 42", 0), 0u);
}

TEST(Cli, FaultInjectedHolderConstantFails) {
  const fs::path dir = workdir("fault");
  EXPECT_EQ(run_cli(dir, "--config " + small_config(dir) + " --fault-inject r_q=0.5 verify"), 1);
  int failed_holder = 0;
  for (const auto& r : csv_rows(dir / "out" / "verify.csv"))
    if (r[0] == "holder" && r.back() == "false") ++failed_holder;
  EXPECT_GT(failed_holder, 0);
}

TEST(Cli, UsageErrors) {
  const fs::path dir = workdir("usage");
  const std::string cfg = small_config(dir);
  EXPECT_EQ(run_cli(dir, "--config " + cfg + " verify --trials 0"), 1);
  EXPECT_EQ(run_cli(dir, "--config " + cfg + " --fault-inject bogus=1 verify"), 1);
  EXPECT_EQ(run_cli(dir, "verify"), 1);
  EXPECT_EQ(run_cli(dir, "--config " + (dir / "missing.ini").string() + " verify"), 1);
}

TEST(Cli, MalformedConfigIsLineAnchored) {
  const fs::path dir = workdir("malformed");
  {
    std::ofstream os(dir / "bad.ini");
    os << "[chart]\ndim = 1\n\nsizes = sixty\n";
  }
  EXPECT_EQ(run_cli(dir, "--config " + (dir / "bad.ini").string() + " verify"), 1);
  EXPECT_NE(slurp(dir / "stderr.txt").find("bad.ini:4:"), std::string::npos) << slurp(dir / "stderr.txt");
}

TEST(Cli, MalformedFieldIsLineAnchored) {
  const fs::path dir = workdir("badfield");
  {
    std::ofstream os(dir / "u.field");
    os << "nehari-field v1\ndim 1 32\n1\n2\nnope\n";
  }
  EXPECT_EQ(run_cli(dir, "--config " + small_config(dir) + " project --field " + (dir / "u.field").string()), 1);
  EXPECT_NE(slurp(dir / "stderr.txt").find("u.field:5: not a number"), std::string::npos)
      << slurp(dir / "stderr.txt");
}

TEST(Cli, SolveWritesReportsWithConfigEcho) {
  const fs::path dir = workdir("solve");
  const std::string cfg = small_config(dir, "[solver]\nmultistart = 1\nmax_outer_iters = 3\n");
  const int code = run_cli(dir, "--config " + cfg + " --seed 7 solve");
  EXPECT_EQ(code, 2) << slurp(dir / "stderr.txt");
  for (const char* name : {"report_plus.json", "report_minus.json"}) {
    std::ifstream is(dir / "out" / name);
    ASSERT_TRUE(is) << name;
    const auto j = nlohmann::json::parse(is);
    for (const char* key : {"status", "target", "class", "J_value", "psi_value", "residual_norm", "min_u",
                            "theta_estimate", "iterations", "energy", "runs", "warnings", "constants", "lambda",
                            "field_file", "experiment", "run"})
      EXPECT_TRUE(j.contains(key)) << name << " lacks " << key;
    EXPECT_EQ(j["run"]["seed"], 7);
    EXPECT_EQ(j["run"]["config"]["seed"], 7);
    EXPECT_EQ(j["lambda"], 0.05);
    EXPECT_FALSE(j["experiment"]["conclusive"].get<bool>());
  }
  EXPECT_TRUE(fs::exists(dir / "out" / "u_minus.field"));
}

}  // namespace
