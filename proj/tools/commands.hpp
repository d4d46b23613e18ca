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
#pragma once

// The verify / solve / sweep / project subcommands. Exit codes: 0 success,
// 1 error or failed check, 2 inconclusive.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nehari.hpp"

namespace nehari::cli {

inline constexpr int kOk = 0;
inline constexpr int kError = 1;
inline constexpr int kInconclusive = 2;

/// Command-line overrides applied on top of the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<int> trials;
  std::map<std::string, std::string> faults;
};

/// Everything derived from the config that several commands need.
struct Session {
  RunConfig config;
  Torus torus;
  ExponentField exponents;
  WeightField weight;
  ConstantsEstimate constants;
  Thresholds thresholds;
  std::optional<double> r_q_fault;
};

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline Session open_session(RunConfig c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.out_dir = *o.out;
  if (o.threads) c.solver.threads = *o.threads;
  if (o.trials) c.verify.trials = *o.trials;
  c.solver.seed = c.seed;
  c.verify.seed = c.seed;
  std::optional<double> r_q;
  for (const auto& [key, value] : o.faults) {
    if (key != "r_q") throw Error("unknown fault-injection key '" + key + "'");
    try {
      r_q = std::stod(value);
    } catch (const std::exception&) {
      throw Error("fault-injection value for r_q is not a number: '" + value + "'");
    }
  }
  Torus m = build_torus(c);
  ExponentField ex = build_exponents(c, m);
  WeightField w = build_weight(c, m);
  ConstantsEstimate consts = estimate_constants(ex, w, m, c.constant_trials, c.seed);
  Thresholds th = thresholds(ex.bounds(), w.mu0(), consts);
  return {std::move(c), std::move(m), std::move(ex), std::move(w), consts, th, r_q};
}

inline double resolve_lambda(const Session& s, const LambdaSpec& l) {
  if (!l.relative) return l.value;
  if (!(s.thresholds.lambda_star_star > 0.0)) throw Error("relative lambda needs lambda** > 0");
  return l.value * s.thresholds.lambda_star_star;
}

inline ProblemInstance session_problem(const Session& s, double lambda) { return build_problem(s.config, lambda); }

inline std::filesystem::path prepare_out(const Session& s) {
  std::filesystem::path dir(s.config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

/// Quotes a CSV cell that holds a comma, quote or newline.
inline std::string csv_cell(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char ch : v) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Provenance lines for CSV artifacts, prefixed with '#'.
inline void write_csv_preamble(std::ostream& os, const Session& s) {
  os << "# seed " << s.config.seed << "\n";
  os << "# config " << to_json(s.config).dump() << "\n";
  os << "# constants " << to_json(s.constants).dump() << "\n";
}

inline Json session_json(const Session& s) {
  return {{"seed", s.config.seed}, {"config", to_json(s.config)}, {"thresholds", to_json(s.thresholds)}};
}

inline int cmd_verify(const Session& s, std::ostream& log = std::cout) {
  const double lambda = s.config.lambda ? resolve_lambda(s, *s.config.lambda)
                                        : resolve_lambda(s, LambdaSpec{true, 0.5});
  const ProblemInstance P = session_problem(s, lambda);
  VerifyOptions opt = s.config.verify;
  opt.r_q_override = s.r_q_fault;
  const VerifyResult r = run_property_suite(P, opt);

  const auto dir = prepare_out(s);
  const auto path = dir / "verify.csv";
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  write_csv_preamble(os, s);
  os << "property,seed,lhs,rhs,margin,pass\n";
  for (const auto& row : r.rows)
    os << csv_cell(row.property) << "," << row.seed << "," << fmt17(row.lhs) << "," << fmt17(row.rhs) << ","
       << fmt17(row.margin) << "," << (row.pass ? "true" : "false") << "\n";
  log << "verify: " << r.rows.size() << " rows, " << r.failures << " failed -> " << path.string() << "\n";
  if (!r.pass()) {
    std::cerr << "first failing row: " << r.first_failure << "\n";
    return kError;
  }
  return kOk;
}

struct SolveArtifacts {
  TwoSolutionResult result;
  double lambda = 0.0;
  std::filesystem::path dir;
};

inline Json experiment_json(const TwoSolutionResult& r, double lambda) {
  return {{"lambda", lambda},
          {"conclusive", r.conclusive},
          {"distinct", r.distinct},
          {"separation", r.separation},
          {"pass", r.pass()},
          {"certificate_plus", {{"min_u", r.certificate_plus.min_u},
                                {"negative_part_norm", r.certificate_plus.negative_part_norm},
                                {"pass", r.certificate_plus.pass}}},
          {"certificate_minus", {{"min_u", r.certificate_minus.min_u},
                                 {"negative_part_norm", r.certificate_minus.negative_part_norm},
                                 {"pass", r.certificate_minus.pass}}},
          {"warnings", r.warnings}};
}

inline SolveArtifacts run_solve(const Session& s) {
  if (!s.config.lambda) throw Error(s.config.source + ": solve needs [problem] lambda");
  SolveArtifacts a;
  a.lambda = resolve_lambda(s, *s.config.lambda);
  const ProblemInstance P = session_problem(s, a.lambda);
  a.result = two_solution_experiment(P, s.config.solver, s.constants);
  a.dir = prepare_out(s);
  const Json base = session_json(s);
  const Json exp = experiment_json(a.result, a.lambda);
  for (const auto& [name, rep] : {std::pair<std::string, const SolutionReport*>{"plus", &a.result.plus},
                                  std::pair<std::string, const SolutionReport*>{"minus", &a.result.minus}}) {
    Json j = to_json(*rep);
    j["lambda"] = a.lambda;
    j["field_file"] = rep->u ? Json("u_" + name + ".field") : Json(nullptr);
    j["experiment"] = exp;
    j["run"] = base;
    write_json((a.dir / ("report_" + name + ".json")).string(), j);
    if (rep->u) write_field((a.dir / ("u_" + name + ".field")).string(), *rep->u);
  }
  return a;
}

inline int cmd_solve(const Session& s, std::ostream& log = std::cout) {
  const SolveArtifacts a = run_solve(s);
  const auto& r = a.result;
  log << "solve: lambda = " << fmt17(a.lambda) << " (lambda** = " << fmt17(s.thresholds.lambda_star_star)
      << ", lambda* = " << fmt17(s.thresholds.lambda_star) << ")\n";
  log << "  plus:  " << to_string(r.plus.status) << ", J = " << fmt17(r.plus.J_value)
      << ", residual = " << fmt17(r.plus.residual_norm) << ", min u = " << fmt17(r.plus.min_u) << "\n";
  log << "  minus: " << to_string(r.minus.status) << ", J = " << fmt17(r.minus.J_value)
      << ", residual = " << fmt17(r.minus.residual_norm) << ", min u = " << fmt17(r.minus.min_u) << "\n";
  log << "  separation = " << fmt17(r.separation) << ", " << (r.pass() ? "two solutions found" : "inconclusive")
      << " -> " << a.dir.string() << "\n";
  return r.pass() ? kOk : kInconclusive;
}

struct SweepRow {
  double lambda = 0.0;
  double theta_plus = std::numeric_limits<double>::quiet_NaN();
  double theta_minus = std::numeric_limits<double>::quiet_NaN();
  int n_plus = 0;
  int n_minus = 0;
  bool two_solutions = false;
};

inline std::vector<SweepRow> run_sweep(const Session& s, std::ostream& log = std::cout) {
  if (!s.config.grid) throw Error(s.config.source + ": sweep needs [sweep] lambdas");
  std::vector<double> lambdas;
  for (double v : s.config.grid->values) lambdas.push_back(s.config.grid->relative ? resolve_lambda(s, {true, v}) : v);
  std::vector<SweepRow> rows;
  Json details = Json::array();
  for (double lambda : lambdas) {
    const ProblemInstance P = session_problem(s, lambda);
    const TwoSolutionResult r = two_solution_experiment(P, s.config.solver, s.constants);
    SweepRow row;
    row.lambda = lambda;
    for (const auto& run : r.plus.runs) row.n_plus += run.status == SolveStatus::converged;
    for (const auto& run : r.minus.runs) row.n_minus += run.status == SolveStatus::converged;
    if (r.plus.converged()) row.theta_plus = r.plus.theta_estimate;
    if (r.minus.converged()) row.theta_minus = r.minus.theta_estimate;
    row.two_solutions = r.pass();
    log << "sweep: lambda = " << fmt17(lambda) << "  theta+ = " << fmt17(row.theta_plus) << " (" << row.n_plus
        << ")  theta- = " << fmt17(row.theta_minus) << " (" << row.n_minus << ")"
        << (row.two_solutions ? "  two solutions" : "") << "\n";
    Json d = experiment_json(r, lambda);
    d["plus"] = to_json(r.plus);
    d["minus"] = to_json(r.minus);
    details.push_back(d);
    rows.push_back(row);
  }
  const auto dir = prepare_out(s);
  {
    std::ofstream os(dir / "sweep.csv");
    if (!os) throw Error("cannot write sweep.csv");
    write_csv_preamble(os, s);
    os << "lambda,theta_plus_estimate,theta_minus_estimate,n_plus_found,n_minus_found,lambda_star,lambda_star_star\n";
    for (const auto& r : rows)
      os << fmt17(r.lambda) << "," << fmt17(r.theta_plus) << "," << fmt17(r.theta_minus) << "," << r.n_plus << ","
         << r.n_minus << "," << fmt17(s.thresholds.lambda_star) << "," << fmt17(s.thresholds.lambda_star_star)
         << "\n";
  }
  Json j = session_json(s);
  j["points"] = details;
  write_json((dir / "sweep.json").string(), j);
  return rows;
}

inline int cmd_sweep(const Session& s, std::ostream& log = std::cout) {
  run_sweep(s, log);
  return kOk;
}

inline int cmd_project(const Session& s, const std::string& field_path, std::ostream& log = std::cout) {
  const double lambda = s.config.lambda ? resolve_lambda(s, *s.config.lambda)
                                        : resolve_lambda(s, LambdaSpec{true, 0.5});
  const ProblemInstance P = session_problem(s, lambda);
  const ScalarField u = read_field(field_path, P.torus.chart);
  const Projection pr = project(P, u);
  const auto dir = prepare_out(s);
  std::ofstream os(dir / "project.csv");
  if (!os) throw Error("cannot write project.csv");
  write_csv_preamble(os, s);
  os << "index,t,class,phi,phi_prime,scale,J\n";
  for (std::size_t k = 0; k < pr.roots.size(); ++k) {
    const auto& r = pr.roots[k];
    const ScalarField w = scaled(u, r.t);
    const double J = energy(P, w).total;
    os << k << "," << fmt17(r.t) << "," << to_string(r.klass) << "," << fmt17(r.phi) << "," << fmt17(r.dphi) << ","
       << fmt17(r.scale) << "," << fmt17(J) << "\n";
    write_field((dir / ("projected_" + std::to_string(k) + ".field")).string(), w);
    log << "root " << k << ": t = " << fmt17(r.t) << ", class " << to_string(r.klass) << ", J = " << fmt17(J) << "\n";
  }
  if (pr.no_root) {
    log << pr.diagnostics << "\n";
    return kInconclusive;
  }
  return kOk;
}

}  // namespace nehari::cli
