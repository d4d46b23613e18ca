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

// Constrained minimization of J over the Nehari branches N+ and N- by
// projected steepest descent, with optional truncation of the lower-order
// terms to u+ and seeded multistart.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nehari/fibering.hpp"
#include "nehari/sampling.hpp"

namespace nehari {

struct SolverConfig {
  int max_outer_iters = 5000;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  double projection_tol = 1e-8;  // |psi| <= projection_tol * scale
  double residual_stop = 1e-6;   // Euclidean norm of the node residual
  int multistart = 8;
  std::uint64_t seed = 42;
  NehariClass target = NehariClass::Minus;
  bool truncate = true;
  double start_bias = 1.0;       // mean of truncated starts
  double start_amplitude = 0.5;  // perturbation size before halving
  int start_max_mode = -1;       // <0: size/8 on the shortest axis
  int start_halvings = 40;
  int threads = 1;

  void validate() const {
    if (max_outer_iters < 1) throw Error("max_outer_iters must be positive");
    if (!(initial_step > 0.0)) throw Error("initial step must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw Error("shrink must lie in (0, 1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0))
      throw Error("sufficient decrease must lie in (0, 1)");
    if (!(projection_tol > 0.0) || !(residual_stop > 0.0)) throw Error("tolerances must be positive");
    if (multistart < 1) throw Error("multistart must be at least 1");
    if (target == NehariClass::Zero) throw Error("target branch must be Plus or Minus");
    if (threads < 1) throw Error("threads must be at least 1");
    if (max_backtracks < 1) throw Error("max_backtracks must be positive");
  }
};

enum class SolveStatus { converged, branch_empty, stalled, max_iterations };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::branch_empty:
      return "branch empty";
    case SolveStatus::stalled:
      return "stalled";
    case SolveStatus::max_iterations:
      return "max iterations";
  }
  return "?";
}

struct RunSummary {
  int start_index = 0;
  SolveStatus status = SolveStatus::branch_empty;
  double J_value = std::numeric_limits<double>::quiet_NaN();
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

struct SolutionReport {
  std::optional<ScalarField> u;
  double J_value = std::numeric_limits<double>::quiet_NaN();
  EnergyBreakdown energy;
  NehariClass klass = NehariClass::Zero;
  NehariClass target = NehariClass::Minus;
  double psi_value = std::numeric_limits<double>::quiet_NaN();
  double psi_scale = 0.0;
  double residual_norm = std::numeric_limits<double>::quiet_NaN();
  double min_u = std::numeric_limits<double>::quiet_NaN();
  double theta_estimate = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  int start_index = -1;
  bool truncate = true;
  bool monotone = true;
  double max_constraint_violation = 0.0;  // max |psi| / scale over accepted iterates
  SolveStatus status = SolveStatus::branch_empty;
  std::vector<RunSummary> runs;
  std::optional<ConstantsEstimate> constants;
  std::vector<std::string> warnings;

  bool converged() const { return status == SolveStatus::converged; }
};

namespace detail {

/// Newton iteration on phi_u from t0, kept on the side of the target class.
inline std::optional<NehariRoot> newton_near(const RayProfile& ray, NehariClass target, double t0 = 1.0) {
  double t = t0;
  for (int k = 0; k < 30; ++k) {
    const double f = ray.phi(t), d = ray.dphi(t);
    if (!(target == NehariClass::Minus ? d < 0.0 : d > 0.0)) return std::nullopt;
    const double tn = t - f / d;
    if (!(tn > 0.5 * t && tn < 2.0 * t)) return std::nullopt;
    const bool done = std::abs(tn - t) <= 1e-15 * t;
    t = tn;
    if (done) break;
  }
  NehariRoot r;
  r.t = t;
  r.phi = ray.phi(t);
  r.dphi = ray.dphi(t);
  r.scale = ray.scale(t);
  r.sign = t * r.dphi;
  r.klass = class_of(r.sign, r.scale);
  r.refined = std::abs(r.phi) <= kRootTolerance * r.scale;
  if (!r.refined || r.klass != target) return std::nullopt;
  return r;
}

/// Root of phi_u of class `target` reached by walking from t0 in the
/// direction the sign of phi_u(t0) dictates.
inline std::optional<NehariRoot> project_near(const RayProfile& ray, NehariClass target, double t0 = 1.0) {
  const double f0 = ray.phi(t0);
  if (f0 == 0.0) {
    NehariRoot r = refine_root(ray, t0, t0, 0.0);
    if (r.klass == target) return r;
    return std::nullopt;
  }
  // N-: phi > 0 left of the root, < 0 right of it; N+ the reverse.
  const bool right = target == NehariClass::Minus ? f0 > 0.0 : f0 < 0.0;
  double a = t0, fa = f0, delta = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const double b = right ? a * (1.0 + delta) : a / (1.0 + delta);
    if (b < 1e-6 || b > 1e6) return std::nullopt;
    const double fb = ray.phi(b);
    if (fb == 0.0 || (fb < 0.0) != (fa < 0.0)) {
      const double lo = std::min(a, b), hi = std::max(a, b);
      const double flo = lo == a ? fa : fb;
      NehariRoot r = fb == 0.0 ? refine_root(ray, b, b, 0.0) : refine_root(ray, lo, hi, flo);
      if (r.klass == target) return r;
      return std::nullopt;
    }
    a = b;
    fa = fb;
    delta = std::min(2.0 * delta, 0.5);
  }
  return std::nullopt;
}

inline std::optional<NehariRoot> select_root(const RayProfile& ray, NehariClass target) {
  return project(ray).first(target);
}

inline double weighted_square(const ScalarField& r, const Torus& m) {
  return reduce_nodes(r.size(), [&](std::size_t i) { return r[i] * r[i] * m.node_weight(i); });
}

struct SingleRun {
  RunSummary summary;
  std::optional<ScalarField> u;
  EnergyBreakdown energy;
  double psi = 0.0;
  double scale = 0.0;
  double residual = 0.0;
  bool monotone = true;
  double max_violation = 0.0;
};

inline ScalarField make_start(const ProblemInstance& P, const SolverConfig& cfg, RandomStream rng, double amplitude) {
  const Chart& c = *P.torus.chart;
  std::size_t shortest = c.size(0);
  for (int a = 1; a < c.dim(); ++a) shortest = std::min(shortest, c.size(a));
  BandLimitedOptions bo;
  bo.max_mode = cfg.start_max_mode >= 0 ? cfg.start_max_mode : static_cast<int>(std::max<std::size_t>(1, shortest / 8));
  bo.random_cutoff = true;
  bo.amplitude = amplitude;
  if (cfg.truncate) {
    bo.mean = cfg.start_bias;
  } else {
    bo.mean_sd = 1.0;
  }
  return random_band_limited(P.torus.chart, rng, bo);
}

inline SingleRun run_single(const ProblemInstance& P, const SolverConfig& cfg, int index) {
  const SourceMode mode = cfg.truncate ? SourceMode::truncated : SourceMode::full;
  const RandomStream stream = RandomStream(cfg.seed, 0x736f6c7665ULL).split(static_cast<std::uint64_t>(index));
  SingleRun out;
  out.summary.start_index = index;

  // Shrink the perturbation until the start ray meets the target branch; the
  // same draw is reused so only its amplitude changes.
  std::optional<ScalarField> u;
  double amp = cfg.start_amplitude;
  for (int h = 0; h <= cfg.start_halvings && !u; ++h, amp *= 0.5) {
    ScalarField v = make_start(P, cfg, stream, amp);
    bool nonzero = false;
    for (double x : v.values) nonzero = nonzero || x != 0.0;
    if (!nonzero) continue;
    const RayProfile ray(P, v, mode);
    if (auto root = select_root(ray, cfg.target)) u = scaled(v, root->t);
  }
  if (!u) {
    out.summary.status = SolveStatus::branch_empty;
    return out;
  }

  EnergyBreakdown e = energy(P, *u, mode);
  Residual r = residual_gradient(P, *u, mode);
  const double eps = std::numeric_limits<double>::epsilon();
  double step = cfg.initial_step;
  double bb_step = 0.0;
  double max_violation = 0.0;
  {
    const RayProfile ray(P, *u, mode);
    max_violation = std::abs(ray.phi(1.0)) / ray.scale(1.0);
  }
  SolveStatus status = SolveStatus::max_iterations;
  int it = 0;
  for (; it < cfg.max_outer_iters; ++it) {
    if (r.norm <= cfg.residual_stop) {
      status = SolveStatus::converged;
      break;
    }
    const double g2 = weighted_square(r.field, P.torus);
    const double noise = 8.0 * eps * e.scale();
    double alpha = std::min(cfg.initial_step, bb_step > 0.0 ? bb_step : 2.0 * step);
    bool accepted = false;
    for (int bt = 0; bt < cfg.max_backtracks; ++bt, alpha *= cfg.shrink) {
      const ScalarField v = combine(1.0, *u, -alpha, r.field);
      const RayProfile ray(P, v, mode);
      std::optional<NehariRoot> root = newton_near(ray, cfg.target);
      if (!root) root = project_near(ray, cfg.target);
      if (!root) root = select_root(ray, cfg.target);
      if (!root) continue;
      const ScalarField w = scaled(v, root->t);
      const RayProfile wray(P, w, mode);
      const double wscale = wray.scale(1.0);
      const double violation = std::abs(wray.phi(1.0)) / wscale;
      if (!(violation <= cfg.projection_tol)) continue;
      const EnergyBreakdown ew = energy(P, w, mode);
      const double decrease = cfg.sufficient_decrease * alpha * g2;
      bool ok = ew.total <= e.total - decrease;
      std::optional<Residual> rw;
      if (!ok && decrease <= noise && ew.total <= e.total + noise) {
        // below the resolution of J: accept only if the residual improves
        rw = residual_gradient(P, w, mode);
        ok = rw->norm < r.norm;
      }
      if (!ok) continue;
      if (ew.total > e.total + noise) out.monotone = false;
      max_violation = std::max(max_violation, violation);
      Residual rn = rw ? std::move(*rw) : residual_gradient(P, w, mode);
      // Barzilai-Borwein trial step for the next iteration
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double wi = P.torus.node_weight(i);
        const double si = w[i] - (*u)[i], yi = rn.field[i] - r.field[i];
        ss += wi * si * si;
        sy += wi * si * yi;
      }
      bb_step = sy > 0.0 ? ss / sy : 0.0;
      *u = w;
      e = ew;
      r = std::move(rn);
      step = alpha;
      accepted = true;
      break;
    }
    if (!accepted) {
      status = SolveStatus::stalled;
      break;
    }
  }
  if (status == SolveStatus::max_iterations && r.norm <= cfg.residual_stop) status = SolveStatus::converged;

  const RayProfile ray(P, *u, mode);
  out.u = std::move(u);
  out.energy = e;
  out.psi = ray.phi(1.0);
  out.scale = ray.scale(1.0);
  out.residual = r.norm;
  out.max_violation = max_violation;
  out.summary.status = status;
  out.summary.J_value = e.total;
  out.summary.residual_norm = r.norm;
  out.summary.iterations = it;
  return out;
}

/// Orders runs by (J, start index).
inline bool better(const SingleRun& a, const SingleRun& b) {
  if (a.summary.J_value != b.summary.J_value) return a.summary.J_value < b.summary.J_value;
  return a.summary.start_index < b.summary.start_index;
}

}  // namespace detail

/// Best of cfg.multistart projected-descent runs on the target branch.
inline SolutionReport minimize_on_branch(const ProblemInstance& P, const SolverConfig& cfg) {
  cfg.validate();
  const SourceMode mode = cfg.truncate ? SourceMode::truncated : SourceMode::full;
  std::vector<detail::SingleRun> runs(static_cast<std::size_t>(cfg.multistart));
  if (cfg.threads <= 1 || cfg.multistart == 1) {
    for (int k = 0; k < cfg.multistart; ++k) runs[static_cast<std::size_t>(k)] = detail::run_single(P, cfg, k);
  } else {
    const int nt = std::min(cfg.threads, cfg.multistart);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int k = t; k < cfg.multistart; k += nt) runs[static_cast<std::size_t>(k)] = detail::run_single(P, cfg, k);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SolutionReport rep;
  rep.target = cfg.target;
  rep.truncate = cfg.truncate;
  rep.warnings = P.warnings;
  const detail::SingleRun* best = nullptr;
  const detail::SingleRun* best_any = nullptr;
  for (const auto& run : runs) {
    rep.runs.push_back(run.summary);
    if (!run.u) continue;
    if (!best_any || detail::better(run, *best_any)) best_any = &run;
    if (run.summary.status == SolveStatus::converged && (!best || detail::better(run, *best))) best = &run;
  }
  const detail::SingleRun* chosen = best ? best : best_any;
  if (!chosen) {
    rep.status = SolveStatus::branch_empty;
    rep.warnings.push_back(std::string("branch empty: no start projects onto ") + to_string(cfg.target));
    return rep;
  }
  rep.status = chosen->summary.status;
  rep.u = chosen->u;
  rep.energy = chosen->energy;
  rep.J_value = chosen->energy.total;
  rep.theta_estimate = rep.J_value;
  rep.psi_value = chosen->psi;
  rep.psi_scale = chosen->scale;
  rep.residual_norm = chosen->residual;
  rep.min_u = chosen->u->min();
  rep.iterations = chosen->summary.iterations;
  rep.start_index = chosen->summary.start_index;
  rep.monotone = chosen->monotone;
  rep.max_constraint_violation = chosen->max_violation;
  try {
    rep.klass = classify(P, *chosen->u, mode);
  } catch (const Error& e) {
    rep.klass = NehariClass::Zero;
    rep.warnings.push_back(e.what());
  }
  if (rep.klass != cfg.target) rep.warnings.push_back("reported field is not classified as the target branch");
  if (!best) rep.warnings.push_back(std::string("no start converged; best run ") + to_string(rep.status));
  return rep;
}

/// J with every lower-order term evaluated at u+ = max(u, 0).
inline double truncated_energy(const ProblemInstance& P, const ScalarField& u) {
  return energy(P, u, SourceMode::truncated).total;
}

inline double truncated_gateaux(const ProblemInstance& P, const ScalarField& u, const ScalarField& phi) {
  return gateaux(P, u, phi, SourceMode::truncated);
}

struct NonnegativityCertificate {
  double min_u = 0.0;
  double negative_part_norm = 0.0;  // Luxemburg L^{p(.)} norm of min(0, u)
  bool pass = false;
};

inline NonnegativityCertificate nonnegativity_certificate(const ProblemInstance& P, const ScalarField& u) {
  require_same_chart(u, P.torus);
  NonnegativityCertificate c;
  c.min_u = u.min();
  ScalarField neg = u;
  for (double& x : neg.values) x = std::min(0.0, x);
  c.negative_part_norm = luxemburg_norm(neg, P.exponents.p(), P.torus);
  c.pass = c.min_u >= -1e-10;
  return c;
}

struct TwoSolutionResult {
  SolutionReport plus;
  SolutionReport minus;
  Thresholds thresholds;
  bool conclusive = false;
  bool distinct = false;
  double separation = 0.0;  // ||u+ - u-|| / (||u+|| + ||u-||), node Euclidean norms
  NonnegativityCertificate certificate_plus;
  NonnegativityCertificate certificate_minus;
  std::vector<std::string> warnings;

  /// Both branches converged to distinct non-negative solutions with
  /// J(u+) < 0 < J(u-).
  bool pass() const {
    return conclusive && distinct && certificate_plus.pass && certificate_minus.pass && plus.J_value < 0.0 &&
           minus.J_value > 0.0;
  }
};

inline TwoSolutionResult two_solution_experiment(const ProblemInstance& P, const SolverConfig& cfg,
                                                 const ConstantsEstimate& consts) {
  TwoSolutionResult res;
  res.thresholds = thresholds(P, consts);
  if (!(P.lambda < res.thresholds.lambda_bar))
    res.warnings.push_back("lambda = " + std::to_string(P.lambda) + " is not below lambda_bar = " +
                           std::to_string(res.thresholds.lambda_bar));
  SolverConfig c = cfg;
  c.truncate = true;
  c.target = NehariClass::Plus;
  res.plus = minimize_on_branch(P, c);
  c.target = NehariClass::Minus;
  res.minus = minimize_on_branch(P, c);
  res.plus.constants = consts;
  res.minus.constants = consts;
  for (auto* r : {&res.plus, &res.minus}) r->warnings.insert(r->warnings.end(), res.warnings.begin(), res.warnings.end());

  res.conclusive = res.plus.converged() && res.minus.converged();
  if (!res.conclusive) res.warnings.push_back("inconclusive: a branch did not converge");
  if (res.plus.u) res.certificate_plus = nonnegativity_certificate(P, *res.plus.u);
  if (res.minus.u) res.certificate_minus = nonnegativity_certificate(P, *res.minus.u);
  if (res.plus.u && res.minus.u) {
    double d = 0.0, a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < res.plus.u->size(); ++i) {
      const double x = (*res.plus.u)[i], y = (*res.minus.u)[i];
      d += (x - y) * (x - y);
      a += x * x;
      b += y * y;
    }
    const double denom = std::sqrt(a) + std::sqrt(b);
    res.separation = denom > 0.0 ? std::sqrt(d) / denom : 0.0;
    res.distinct = res.separation > 1e-6;
  }
  return res;
}

}  // namespace nehari
