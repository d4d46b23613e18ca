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
// Acceptance checks. Prints one PASS/FAIL line per criterion; exit code is
// the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "nehari.hpp"

namespace {

using namespace nehari;
namespace fs = std::filesystem;

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 42;

// pinned tolerances
constexpr double kMarginTol = 1e-12;
constexpr double kDefiningTol = 1e-10;
constexpr double kFdStep = 1e-5;
constexpr double kFdRelTol = 1e-6;
constexpr double kPsiTol = 1e-12;
constexpr double kGoldenTol = 1e-9;
constexpr double kResidualTol = 1e-6;
constexpr double kNonnegTol = -1e-10;
constexpr double kSeparationTol = 1e-6;
constexpr double kRuntimeLimit = 120.0;
constexpr int kConstantTrials = 1000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ScalarField fourier(const Torus& m, const std::string& spec) { return evaluate_field_spec({spec, "acceptance", 0}, m.chart); }

/// Band-limited field whose amplitude spans 10^lo .. 10^hi.
ScalarField trial(const Torus& m, RandomStream& rng, double lo, double hi, double mean_sd = 1.0) {
  BandLimitedOptions o;
  o.mean_sd = mean_sd;
  o.max_mode = 8;
  ScalarField u = random_band_limited(m.chart, rng, o);
  return scaled(u, std::pow(10.0, rng.uniform(lo, hi)));
}

ProblemInstance reference_problem(double lambda) {
  const Torus m = build_torus(1, {64});
  return make_problem(m, ExponentField(m.constant(3.0), m.constant(2.0)), WeightField(m.constant(1.0)), lambda,
                      Nonlinearity::power(4.0, m.constant(1.0)));
}

ConstantsEstimate reference_constants() {
  const Torus m = build_torus(1, {64});
  return estimate_constants(ExponentField(m.constant(3.0), m.constant(2.0)), WeightField(m.constant(1.0)), m,
                            kConstantTrials, kSeed);
}

Outcome function_space_suite() {
  const Torus m = build_torus(1, {64});
  const ExponentField ex(fourier(m, "fourier 3 cos:0:1:0.5"), fourier(m, "fourier 1.7 sin:0:1:0.2"));
  RandomStream root(kSeed, 1);
  int holder_fail = 0, clause_fail = 0, defining_fail = 0;
  double worst_margin = INFINITY, worst_defining = 0.0;
  for (int t = 0; t < 1000; ++t) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(t));
    const ScalarField u = trial(m, rng, -2.0, 2.0);
    const ScalarField v = trial(m, rng, -2.0, 2.0);
    for (const ScalarField* e : {&ex.q(), &ex.p()}) {
      if (!holder_check(u, v, *e, m).pass) ++holder_fail;
      const auto rel = modular_norm_relations(u, *e, m, kMarginTol);
      worst_margin = std::min(worst_margin, rel.min_margin());
      if (!rel.pass) ++clause_fail;
      const double d = std::abs(modular(scaled(u, 1.0 / rel.norm), *e, m) - 1.0);
      worst_defining = std::max(worst_defining, d);
      if (!(d <= kDefiningTol)) ++defining_fail;
    }
  }
  return {holder_fail == 0 && clause_fail == 0 && defining_fail == 0,
          "1000 fields, q in [1.5,1.9], p in [2.5,3.5]: holder violations " + std::to_string(holder_fail) +
              ", clause violations " + std::to_string(clause_fail) + " (min margin " + g(worst_margin) +
              "), max |rho(u/|u|) - 1| = " + g(worst_defining)};
}

Outcome derivative_consistency() {
  const Torus m = build_torus(1, {64});
  const ProblemInstance P =
      make_problem(m, ExponentField(fourier(m, "fourier 3 cos:0:1:0.5"), fourier(m, "fourier 1.7 sin:0:1:0.2")),
                   WeightField(fourier(m, "fourier 1.5 sin:0:2:0.5")), 0.3, Nonlinearity::power(4.0, m.constant(1.0)));
  RandomStream root(kSeed, 2);
  double worst_fd = 0.0, worst_scaled = 0.0, worst_psi = 0.0;
  int fd_fail = 0, psi_fail = 0;
  for (int t = 0; t < 100; ++t) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(t));
    const ScalarField u = trial(m, rng, -1.0, 0.0);
    const ScalarField phi = trial(m, rng, -1.0, 0.0);
    const double fd =
        (energy(P, combine(1.0, u, kFdStep, phi)).total - energy(P, combine(1.0, u, -kFdStep, phi)).total) /
        (2.0 * kFdStep);
    const double an = gateaux(P, u, phi);
    const double rel = std::abs(an - fd) / std::max(std::abs(an), std::abs(fd));
    // same gap against sum_i w_i |r_i phi_i|, the size of <J'(u), phi> before cancellation
    const Residual r = residual_gradient(P, u);
    const double mag = detail::reduce_nodes(u.size(), [&](std::size_t i) {
      return std::abs(r.field[i] * phi[i]) * m.node_weight(i);
    });
    worst_fd = std::max(worst_fd, rel);
    worst_scaled = std::max(worst_scaled, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), mag}));
    if (!(rel <= kFdRelTol)) ++fd_fail;
    const double dpsi = std::abs(psi(P, u) - gateaux(P, u, u)) / psi_scale(P, u);
    worst_psi = std::max(worst_psi, dpsi);
    if (!(dpsi <= kPsiTol)) ++psi_fail;
  }
  return {fd_fail == 0 && psi_fail == 0, "100 pairs: " + std::to_string(fd_fail) +
                                             " over tolerance, max relative gateaux/central-difference gap " +
                                             g(worst_fd) + " (" + g(worst_scaled) +
                                             " against the node-basis magnitude)" +
                                             ", max |psi(u) - <J'(u),u>| / scale " + g(worst_psi)};
}

Outcome fibering_oracle() {
  // phi(t) = t^3 (A+D) + t^2 (mu B - lambda C) - t^4 E with all three set to 1
  const Torus m = build_torus(1, {64});
  ScalarField u = fourier(m, "fourier 0 sin:0:1:1");
  const ProblemInstance probe = reference_problem(1.0);
  EnergyBreakdown e = energy(probe, u);
  u = scaled(u, std::cbrt(1.0 / (3.0 * e.grad_p_term + 3.0 * e.u_p_term)));
  e = energy(probe, u);
  const double B = 2.0 * e.grad_q_term, C = 2.0 * e.lambda_q_term, E = 4.0 * e.F_term;
  const double lambda = 0.1, mu = (1.0 + lambda * C) / B;
  const ProblemInstance P = make_problem(m, ExponentField(m.constant(3.0), m.constant(2.0)),
                                         WeightField(m.constant(mu)), lambda,
                                         Nonlinearity::power(4.0, m.constant(1.0 / E)));
  const Projection pr = project(P, u);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  if (pr.roots.size() != 1) return {false, std::to_string(pr.roots.size()) + " roots found"};
  const double err = std::abs(pr.roots[0].t - golden);
  const NehariClass c = classify(P, scaled(u, pr.roots[0].t));
  return {err <= kGoldenTol && pr.roots[0].klass == NehariClass::Minus && c == NehariClass::Minus,
          "t* = " + cli::fmt17(pr.roots[0].t) + ", |t* - golden| = " + g(err) + ", class " + to_string(c)};
}

Outcome minus_energy_sign() {
  const ConstantsEstimate k = reference_constants();
  const Torus m = build_torus(1, {64});
  const Thresholds th = thresholds(ExponentBounds{3.0, 3.0, 2.0, 2.0}, 1.0, k);
  const double lambda = th.lambda_star_star / 2.0;
  const ProblemInstance P = reference_problem(lambda);
  RandomStream root(kSeed, 4);
  int sampled = 0, positive = 0, draws = 0;
  double min_J = INFINITY;
  while (sampled < 200 && draws < 10000) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(draws++));
    const ScalarField u = trial(m, rng, -3.0, 1.0);
    const auto r = project(P, u).first(NehariClass::Minus);
    if (!r) continue;
    ++sampled;
    const double J = energy(P, scaled(u, r->t)).total;
    min_J = std::min(min_J, J);
    if (J > 0.0) ++positive;
  }
  ConstantsEstimate unit;
  unit.c_poincare = unit.D_embed = unit.c1_embed = 1.0;
  const double formula = thresholds(ExponentBounds{3.0, 3.0, 2.0, 2.0}, 1.0, unit).lambda_star_star;
  const bool sign_ok = sampled == 200 && positive == 200;
  const bool formula_ok = formula == 1.0 / 12.0;
  return {sign_ok && formula_ok,
          "lambda = lambda**/2 = " + g(lambda) + ": " + std::to_string(positive) + "/" + std::to_string(sampled) +
              " Minus-projected fields with J > 0 (min J " + g(min_J) + ") [" + (sign_ok ? "ok" : "violated") +
              "]; unit-constant lambda** = " + cli::fmt17(formula) + " vs expected 1/12 [" +
              (formula_ok ? "ok" : "mismatch") + "]"};
}

Outcome no_inflection_points() {
  const Torus m = build_torus(1, {64});
  const ExponentField ex(fourier(m, "fourier 3 sin:0:1:0.2"), fourier(m, "fourier 2 cos:0:1:0.05"));
  const WeightField w(fourier(m, "fourier 5 sin:0:1:1"));
  const ConstantsEstimate k = estimate_constants(ex, w, m, kConstantTrials, kSeed);
  const Thresholds th = thresholds(ex.bounds(), w.mu0(), k);
  if (!(th.lambda_star > 0.0)) return {false, "lambda* is not positive (raw " + g(th.lambda_star_raw) + ")"};
  const double lambda = th.lambda_star / 2.0;
  const ProblemInstance P = make_problem(m, ex, w, lambda, Nonlinearity::power(4.0, m.constant(1.0)));
  RandomStream root(kSeed, 5);
  int fields = 0, roots = 0, zero = 0, draws = 0;
  while (fields < 1000 && draws < 10000) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(draws++));
    const ScalarField u = trial(m, rng, -3.0, 1.0);
    const Projection pr = project(P, u);
    if (pr.roots.empty()) continue;
    ++fields;
    for (const auto& r : pr.roots) {
      ++roots;
      if (r.klass == NehariClass::Zero || classify(P, scaled(u, r.t)) == NehariClass::Zero) ++zero;
    }
  }
  return {fields == 1000 && zero == 0, "lambda = lambda*/2 = " + g(lambda) + ": " + std::to_string(fields) +
                                           " projected fields, " + std::to_string(roots) + " roots, " +
                                           std::to_string(zero) + " Zero classifications"};
}

struct SolveRun {
  cli::SolveArtifacts art;
  double seconds = 0.0;
};

SolveRun solve_config(const std::string& name, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  cli::Overrides o;
  o.out = out.string();
  o.threads = 1;
  const cli::Session s = cli::open_session(load_config(std::string(NEHARI_SOURCE_DIR) + "/configs/" + name), o);
  SolveRun r{cli::run_solve(s), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string describe(const SolveRun& r) {
  const auto& x = r.art.result;
  return "lambda " + g(r.art.lambda) + ", J+ " + g(x.plus.J_value) + " (" + to_string(x.plus.status) + "), J- " +
         g(x.minus.J_value) + " (" + to_string(x.minus.status) + "), residuals " + g(x.plus.residual_norm) + "/" +
         g(x.minus.residual_norm) + ", min u " + g(std::min(x.plus.min_u, x.minus.min_u)) + ", separation " +
         g(x.separation) + ", " + g(r.seconds) + " s";
}

bool judged_pass(const SolveRun& r) {
  const auto& x = r.art.result;
  return x.conclusive && x.plus.J_value < 0.0 && x.minus.J_value > 0.0 && x.plus.residual_norm <= kResidualTol &&
         x.minus.residual_norm <= kResidualTol && x.plus.min_u >= kNonnegTol && x.minus.min_u >= kNonnegTol &&
         x.separation > kSeparationTol && r.seconds <= kRuntimeLimit;
}

Outcome two_solutions(const fs::path& work) {
  const SolveRun ref = solve_config("reference_1d.ini", work / "c6_reference");
  if (ref.art.result.conclusive)
    return {judged_pass(ref), "reference: " + describe(ref)};
  const SolveRun alt = solve_config("alternate_1d.ini", work / "c6_alternate");
  return {judged_pass(alt), "reference inconclusive (" + describe(ref) + "); alternate from sweep: " + describe(alt)};
}

Outcome coercivity_witness() {
  const ConstantsEstimate k = reference_constants();
  const Thresholds th = thresholds(ExponentBounds{3.0, 3.0, 2.0, 2.0}, 1.0, k);
  const ProblemInstance P = reference_problem(th.lambda_star_star / 2.0);
  const Torus& m = P.torus;
  RandomStream root(kSeed, 7);
  int ok = 0;
  double worst = INFINITY;
  for (int d = 0; d < 50; ++d) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(d));
    const ScalarField u = trial(m, rng, 0.0, 0.0);
    const double j100 = energy(P, scaled(u, 100.0)).total;
    const double j1000 = energy(P, scaled(u, 1000.0)).total;
    worst = std::min(worst, j1000);
    if (j100 < j1000 && j1000 > 0.0) ++ok;
  }
  return {ok == 50, std::to_string(ok) + "/50 directions with J(100u) < J(1000u) and J(1000u) > 0; min J(1000u) = " +
                        g(worst)};
}

std::string bytes_of(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism(const fs::path& work) {
  const std::vector<std::string> files{"report_plus.json", "report_minus.json", "u_plus.field", "u_minus.field"};
  std::string detail;
  bool all = true;
  for (const char* name : {"reference_1d.ini", "alternate_1d.ini"}) {
    const fs::path out = work / (std::string("c8_") + name);
    fs::remove_all(out);
    solve_config(name, out);
    std::vector<std::string> first;
    for (const auto& f : files) first.push_back(fs::exists(out / f) ? bytes_of(out / f) : std::string());
    for (const auto& f : files) fs::remove(out / f);
    solve_config(name, out);
    int same = 0, total = 0;
    for (std::size_t k = 0; k < files.size(); ++k) {
      const std::string second = fs::exists(out / files[k]) ? bytes_of(out / files[k]) : std::string();
      if (first[k].empty() && second.empty()) continue;
      ++total;
      if (first[k] == second) ++same;
    }
    all = all && same == total && total >= 2;
    detail += std::string(detail.empty() ? "" : "; ") + name + ": " + std::to_string(same) + "/" +
              std::to_string(total) + " artifacts byte-identical";
  }
  return {all, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  std::string work = "acceptance_out";
  app.add_option("--only", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
  app.add_option("--work", work, "scratch directory for solver artifacts");
  CLI11_PARSE(app, argc, argv);

  const fs::path dir = fs::absolute(work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"function-space suite", function_space_suite},
      {"derivative consistency", derivative_consistency},
      {"fibering golden-ratio oracle", fibering_oracle},
      {"minus-branch energy sign and unit-constant lambda**", minus_energy_sign},
      {"no inflection points below lambda*", no_inflection_points},
      {"two non-negative solutions", [&] { return two_solutions(dir); }},
      {"coercivity along rays", coercivity_witness},
      {"determinism of solve artifacts", [&] { return determinism(dir); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && static_cast<std::size_t>(only) != k + 1) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("c%zu %s  %s: %s\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
