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

// Randomized property suite: every function-space inequality plus the
// derivative checks, one row per trial.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nehari/fibering.hpp"
#include "nehari/sampling.hpp"

namespace nehari {

struct PropertyRow {
  std::string property;
  std::uint64_t seed = 0;  // fields of this trial come from RandomStream(seed, kVerifyStream)
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // (rhs - lhs) / max(1, |lhs|, |rhs|); >= -tolerance on pass
  bool pass = false;
};

struct VerifyOptions {
  int trials = 1000;
  int derivative_trials = 100;
  int constant_trials = 200;
  std::uint64_t seed = 42;
  std::optional<double> r_q_override;  // fault injection
  double fd_step = 1e-5;
};

struct VerifyResult {
  std::vector<PropertyRow> rows;
  std::size_t failures = 0;
  std::string first_failure;
  bool pass() const { return failures == 0; }
};

inline constexpr std::uint64_t kVerifyStream = 0x766572696679ULL;

namespace detail {

inline ScalarField trial_field(const ChartPtr& chart, RandomStream& rng, double lo_decade, double hi_decade) {
  BandLimitedOptions bo;
  bo.mean_sd = 1.0;
  bo.amplitude = 1.0;
  ScalarField u = random_band_limited(chart, rng, bo);
  return scaled(u, std::pow(10.0, rng.uniform(lo_decade, hi_decade)));
}

inline ScalarField positive_weight(const ChartPtr& chart, RandomStream& rng) {
  BandLimitedOptions bo;
  bo.amplitude = 0.5;
  ScalarField u = random_band_limited(chart, rng, bo);
  const double base = std::exp(rng.uniform(-1.0, 1.0));
  for (double& x : u.values) x = base * std::exp(x);
  return u;
}

class RowSink {
public:
  explicit RowSink(VerifyResult& r) : r_(r) {}

  void add(std::string name, std::uint64_t seed, double lhs, double rhs, double tol = 1e-12) {
    const Clause c = make_clause(name, lhs, rhs);
    push({std::move(name), seed, lhs, rhs, c.margin, c.margin >= -tol && std::isfinite(lhs) && std::isfinite(rhs)});
  }
  /// Error-style row: pass iff lhs <= rhs, margin = rhs - lhs.
  void bound(std::string name, std::uint64_t seed, double lhs, double rhs) {
    push({std::move(name), seed, lhs, rhs, rhs - lhs, lhs <= rhs});
  }
  void push(PropertyRow row) {
    if (!row.pass) {
      if (r_.failures == 0)
        r_.first_failure = row.property + " (seed " + std::to_string(row.seed) + "): lhs=" + format17(row.lhs) +
                           " rhs=" + format17(row.rhs);
      ++r_.failures;
    }
    r_.rows.push_back(std::move(row));
  }

private:
  static std::string format17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }
  VerifyResult& r_;
};

}  // namespace detail

/// Runs the suite on the instance's torus, exponents and weight.
inline VerifyResult run_property_suite(const ProblemInstance& P, const VerifyOptions& opt) {
  if (opt.trials < 1) throw Error("trials must be at least 1");
  const Torus& m = P.torus;
  const ExponentField& ex = P.exponents;
  const ChartPtr& chart = m.chart;
  VerifyResult result;
  detail::RowSink sink(result);

  const ConstantsEstimate consts = estimate_constants(ex, P.weight, m, std::max(100, opt.constant_trials), opt.seed);
  const auto b = ex.bounds();
  const double said_factor =
      std::pow(1.01 * consts.D_embed, b.p_plus) * std::pow(1.01 * consts.c_poincare + 1.0, b.p_plus);

  for (int t = 0; t < opt.trials; ++t) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(t);
    RandomStream rng(seed, kVerifyStream);
    const ScalarField u = detail::trial_field(chart, rng, -2.0, 1.0);
    const ScalarField v = detail::trial_field(chart, rng, -2.0, 1.0);

    const HolderCheck h = holder_check(u, v, ex.q(), m, opt.r_q_override);
    sink.add("holder", seed, h.lhs, h.rhs);
    sink.add("holder_tight", seed, h.lhs, h.rhs_tight);

    for (const auto* e : {&ex.q(), &ex.p()}) {
      const std::string tag = e == &ex.q() ? "q" : "p";
      const double n = luxemburg_norm(u, *e, m);
      sink.bound("luxemburg_defining_" + tag, seed, std::abs(modular(scaled(u, 1.0 / n), *e, m) - 1.0), 1e-10);
      const ModularNormReport rep = modular_norm_relations(u, *e, m);
      for (const auto& c : rep.clauses) sink.add("modular_" + tag + " " + c.name, seed, c.lhs, c.rhs);
        const double s = rng.uniform(-3.0, 3.0);
      const double ns = luxemburg_norm(scaled(u, s), *e, m);
      sink.bound("homogeneity_" + tag, seed, std::abs(ns - std::abs(s) * n), 1e-10 * std::abs(s) * n);
    }

    const WeightField w(detail::positive_weight(chart, rng));
    const ModularNormReport wr = weighted_norm_relations(u, ex.q(), w, m);
    for (const auto& c : wr.clauses) sink.add("weighted_q " + c.name, seed, c.lhs, c.rhs);

    // Embedding estimate on zero-mean fields scaled into the regime where
    // both ||u||_p and rho_q(|grad u|) are at least 1.
    ScalarField z = zero_mean(v, m);
    const ScalarField gz = grad_norm_g(z, m);
    const double nz = luxemburg_norm(z, ex.p(), m), ngz = luxemburg_norm(gz, ex.q(), m);
    if (nz > 0.0 && ngz > 0.0) {
      const double k = std::max({1.0, 1.0 / nz, 1.0 / ngz}) * (1.0 + 3.0 * rng.uniform());
      z = scaled(z, k);
      const double lhs = modular(z, ex.p(), m);
      const double rhs = said_factor * std::pow(modular(grad_norm_g(z, m), ex.q(), m), b.p_plus / b.q_minus);
      sink.add("embedding_estimate", seed, lhs, rhs);
    }
  }

  for (int t = 0; t < opt.derivative_trials; ++t) {
    const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(t);
    RandomStream rng(seed, kVerifyStream ^ 0x646572ULL);
    const ScalarField u = detail::trial_field(chart, rng, -0.5, 0.3);
    const ScalarField phi = detail::trial_field(chart, rng, -0.5, 0.3);
    for (SourceMode mode : {SourceMode::full, SourceMode::truncated}) {
      const std::string tag = mode == SourceMode::full ? "" : "_truncated";
      const double g = gateaux(P, u, phi, mode);
      const double h = opt.fd_step;
      const double fd = (energy(P, combine(1.0, u, h, phi), mode).total -
                         energy(P, combine(1.0, u, -h, phi), mode).total) /
                        (2.0 * h);
      sink.bound("gateaux_fd" + tag, seed, std::abs(g - fd), 1e-6 * (1.0 + std::abs(g)));
    }
    const double ps = psi(P, u);
    const double gu = gateaux(P, u, u);
    sink.bound("psi_gateaux", seed, std::abs(ps - gu), 1e-12 * std::max(1.0, psi_scale(P, u)));
  }

  for (const auto* e : {&ex.p(), &ex.q()}) {
    const LogHolderResult lh = log_holder_check(*e);
    sink.bound(std::string("log_holder_") + (e == &ex.p() ? "p" : "q"), opt.seed, lh.constant, lh.limit);
  }
  {
    std::vector<double> alphas;
    for (double a : {0.5, 1.0, 2.0, 5.0, -1.0, -3.0})
      if (std::abs(a) > P.nonlinearity.A_threshold()) alphas.push_back(a);
    const F1Check f1 = check_f1(P.nonlinearity, ex, m, alphas);
    for (const auto& row : f1.rows) sink.add("source_f1", opt.seed, row.lhs, row.rhs);
    if (!f1.pass && f1.rows.empty()) sink.push({"source_f1", opt.seed, 0.0, 0.0, -1.0, false});
    const F3Check f3 = check_f3(P.nonlinearity, ex, m);
    for (std::size_t k = 1; k < f3.ratios.size(); ++k)
      sink.bound("source_f3", opt.seed, f3.ratios[k], f3.ratios[k - 1] * (1.0 - 1e-9));
  }
  return result;
}

}  // namespace nehari
