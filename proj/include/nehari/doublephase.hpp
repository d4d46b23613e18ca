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

// The double-phase problem on a discrete torus:
//
//   J(u) = int |grad u|^p / p + mu |grad u|^q / q - lambda |u|^q / q
//          + |u|^p / p - F(x, u)  dv_g
//
// with exponents p(x), q(x), weight mu(x) and a superlinear source f with
// primitive F. Only the energy and its directional derivatives are built;
// the operator itself is never assembled.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "nehari/manifold.hpp"
#include "nehari/orlicz.hpp"

namespace nehari {

/// full: J as written. truncated: every lower-order term (lambda, |u|^p and
/// the source) sees only u+ = max(u, 0); gradient terms are unchanged.
enum class SourceMode { full, truncated };

/// Source term f(x,s) = a(x) g(s). The power family g(s) = |s|^{beta-2} s is
/// the verified default; a tabulated g is accepted but flagged.
class Nonlinearity {
public:
  static Nonlinearity power(double beta, ScalarField amplitude, double A_threshold = 0.0) {
    if (!(beta > 1.0)) throw Error("source exponent beta must exceed 1");
    Nonlinearity nl(std::move(amplitude));
    nl.beta_ = beta;
    nl.A_ = A_threshold;
    return nl;
  }

  /// Piecewise-linear g through (s_k, g_k), linearly extrapolated; the
  /// primitive is integrated exactly. `beta` is the claimed AR exponent.
  static Nonlinearity tabulated(std::vector<double> s, std::vector<double> g, ScalarField amplitude, double beta,
                                double A_threshold = 0.0) {
    if (s.size() < 2 || s.size() != g.size()) throw Error("tabulated source needs matching s and g columns");
    for (std::size_t k = 1; k < s.size(); ++k)
      if (!(s[k] > s[k - 1])) throw Error("tabulated source abscissae must increase strictly");
    Nonlinearity nl(std::move(amplitude));
    nl.beta_ = beta;
    nl.A_ = A_threshold;
    nl.power_ = false;
    nl.s_ = std::move(s);
    nl.g_ = std::move(g);
    nl.cum_.assign(nl.s_.size(), 0.0);
    for (std::size_t k = 1; k < nl.s_.size(); ++k)
      nl.cum_[k] = nl.cum_[k - 1] + 0.5 * (nl.s_[k] - nl.s_[k - 1]) * (nl.g_[k] + nl.g_[k - 1]);
    nl.G0_ = 0.0;
    nl.G0_ = nl.raw_primitive(0.0);
    return nl;
  }

  bool is_power() const { return power_; }
  bool hypotheses_verified() const { return power_; }
  double beta() const { return beta_; }
  double A_threshold() const { return A_; }
  const ScalarField& amplitude() const { return a_; }

  /// f(x_i, s)
  double f(std::size_t i, double s) const { return a_[i] * g(s); }
  /// F(x_i, s) = int_0^s f(x_i, t) dt
  double F(std::size_t i, double s) const {
    if (power_) return s == 0.0 ? 0.0 : a_[i] * std::pow(std::abs(s), beta_) / beta_;
    return a_[i] * (raw_primitive(s) - G0_);
  }
  /// f(x_i, s) * s
  double fs(std::size_t i, double s) const {
    if (power_) return s == 0.0 ? 0.0 : a_[i] * std::pow(std::abs(s), beta_);
    return f(i, s) * s;
  }
  /// d/ds [f(x_i, s) s]
  double dfs(std::size_t i, double s) const {
    if (power_) return s == 0.0 ? 0.0 : beta_ * f(i, s);
    return a_[i] * (slope(s) * s + g(s));
  }

private:
  explicit Nonlinearity(ScalarField a) : a_(std::move(a)) {
    for (double x : a_.values)
      if (!(x > 0.0) || !std::isfinite(x)) throw Error("source amplitude a(x) must be positive");
  }

  std::size_t segment(double s) const {
    auto it = std::upper_bound(s_.begin(), s_.end(), s);
    std::size_t k = it == s_.begin() ? 0 : static_cast<std::size_t>(it - s_.begin()) - 1;
    return std::min(k, s_.size() - 2);
  }
  double slope(double s) const {
    const std::size_t k = segment(s);
    return (g_[k + 1] - g_[k]) / (s_[k + 1] - s_[k]);
  }
  double g(double s) const {
    if (power_) return s == 0.0 ? 0.0 : std::pow(std::abs(s), beta_ - 2.0) * s;
    const std::size_t k = segment(s);
    return g_[k] + slope(s) * (s - s_[k]);
  }
  double raw_primitive(double s) const {
    const std::size_t k = segment(s);
    return cum_[k] + 0.5 * (s - s_[k]) * (g_[k] + g(s));
  }

  ScalarField a_;
  double beta_ = 0.0;
  double A_ = 0.0;
  bool power_ = true;
  std::vector<double> s_, g_, cum_;
  double G0_ = 0.0;
};

inline ScalarField f_eval(const Nonlinearity& nl, const ScalarField& u) {
  ScalarField out(u.chart);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = nl.f(i, u[i]);
  return out;
}

inline ScalarField F_eval(const Nonlinearity& nl, const ScalarField& u) {
  ScalarField out(u.chart);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = nl.F(i, u[i]);
  return out;
}

struct HypothesisRow {
  double alpha = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct F1Check {
  bool pass = false;
  std::string reason;
  std::vector<HypothesisRow> rows;  // lhs = int F(x,alpha), rhs = int f(x,alpha) alpha / beta
};

/// Ambrosetti-Rabinowitz check on constant arguments |alpha| > A:
/// 0 < int F(x,alpha) dv_g <= int f(x,alpha) alpha / beta dv_g.
inline F1Check check_f1(const Nonlinearity& nl, const ExponentField& ex, const Torus& m,
                        const std::vector<double>& samples) {
  F1Check r;
  if (!(nl.beta() > ex.p_plus())) {
    r.reason = "beta = " + std::to_string(nl.beta()) + " does not exceed p+ = " + std::to_string(ex.p_plus());
    return r;
  }
  r.pass = true;
  for (double alpha : samples) {
    if (!(std::abs(alpha) > nl.A_threshold())) continue;
    HypothesisRow row{alpha, 0.0, 0.0};
    row.lhs = detail::reduce_nodes(m.node_count(), [&](std::size_t i) { return nl.F(i, alpha) * m.node_weight(i); });
    row.rhs = detail::reduce_nodes(m.node_count(),
                                   [&](std::size_t i) { return nl.fs(i, alpha) / nl.beta() * m.node_weight(i); });
    const bool ok = row.lhs > 0.0 && row.lhs <= row.rhs * (1.0 + 1e-12);
    if (!ok && r.pass) {
      r.pass = false;
      r.reason = "alpha = " + std::to_string(alpha) + ": int F = " + std::to_string(row.lhs) +
                 ", int f alpha / beta = " + std::to_string(row.rhs);
    }
    r.rows.push_back(row);
  }
  return r;
}

struct F3Check {
  bool pass = false;
  std::vector<double> alphas;
  std::vector<double> ratios;  // max_x |f(x,alpha)| / |alpha|^{q(x)-1}
};

/// Small-argument decay of f relative to |alpha|^{q(x)-1}: the ratio must
/// shrink strictly at each decade alpha = 1e-1, ..., 1e-6.
inline F3Check check_f3(const Nonlinearity& nl, const ExponentField& ex, const Torus& m) {
  require_same_chart(ex.q(), m);
  const ScalarField& q = ex.q();
  F3Check r;
  for (int k = 1; k <= 6; ++k) {
    const double alpha = std::pow(10.0, -k);
    double worst = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
      worst = std::max(worst, std::abs(nl.f(i, alpha)) / std::pow(alpha, q[i] - 1.0));
    r.alphas.push_back(alpha);
    r.ratios.push_back(worst);
  }
  r.pass = true;
  for (std::size_t k = 1; k < r.ratios.size(); ++k)
    if (!(r.ratios[k] < r.ratios[k - 1] * (1.0 - 1e-9))) r.pass = false;
  return r;
}

/// One fully specified instance of the problem.
struct ProblemInstance {
  Torus torus;
  ExponentField exponents;
  WeightField weight;
  double lambda;
  Nonlinearity nonlinearity;
  std::vector<std::string> warnings;

  int dim() const { return torus.chart->dim(); }
};

/// Validates and records the soft conditions as warnings.
inline ProblemInstance make_problem(Torus torus, ExponentField ex, WeightField w, double lambda, Nonlinearity nl) {
  require_same_chart(ex.p(), torus);
  require_same_chart(w.mu(), torus);
  require_same_chart(nl.amplitude(), torus);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("lambda must be positive");
  if (!(nl.beta() > ex.p_plus()))
    throw Error("source exponent beta = " + std::to_string(nl.beta()) + " must exceed p+ = " +
                std::to_string(ex.p_plus()));
  std::vector<std::string> warnings;
  const auto b = ex.bounds();
  const double n = torus.chart->dim();
  if (!(b.p_plus < n)) warnings.push_back("p+ < N fails (p+ = " + std::to_string(b.p_plus) + ", N = " +
                                          std::to_string(torus.chart->dim()) + ")");
  {
    const double gap = b.q_plus - b.q_minus;
    const double lhs = gap > 0.0 ? b.p_plus / gap : std::numeric_limits<double>::infinity();
    const double rhs = (b.p_plus - b.q_plus) / (b.p_plus - b.q_minus) -
                       gap * (b.p_plus - b.q_plus) / ((b.p_plus - b.q_minus) * (b.p_minus - b.q_minus));
    if (!(lhs < rhs)) warnings.push_back("exponent gap inequality p+/(q+ - q-) < ... fails");
  }
  if (!(b.p_minus / b.q_plus <= 1.0 + 1.0 / n)) warnings.push_back("p-/q+ <= 1 + 1/N fails");
  if (!nl.hypotheses_verified()) warnings.push_back("tabulated source: unverified hypotheses");
  return {std::move(torus), std::move(ex), std::move(w), lambda, std::move(nl), std::move(warnings)};
}

struct EnergyBreakdown {
  double grad_p_term = 0.0;    // int |grad u|^p / p
  double grad_q_term = 0.0;    // int mu |grad u|^q / q
  double lambda_q_term = 0.0;  // int lambda |u|^q / q
  double u_p_term = 0.0;       // int |u|^p / p
  double F_term = 0.0;         // int F(x, u)
  double total = 0.0;

  double scale() const {
    return std::abs(grad_p_term) + std::abs(grad_q_term) + std::abs(lambda_q_term) + std::abs(u_p_term) +
           std::abs(F_term);
  }
};

namespace detail {

inline double pos_pow(double a, double e) { return a == 0.0 ? 0.0 : std::pow(a, e); }

/// r^{e-2}, taken as 0 at r = 0 (the flux r^{e-2} grad u vanishes there).
inline double flux_density(double r, double e) { return r == 0.0 ? 0.0 : std::pow(r, e - 2.0); }

inline double lower_arg(double u, SourceMode mode) { return mode == SourceMode::truncated ? std::max(u, 0.0) : u; }

}  // namespace detail

inline EnergyBreakdown energy(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full) {
  require_same_chart(u, P.torus);
  const ScalarField G = grad_norm_g(u, P.torus);
  const auto& p = P.exponents.p();
  const auto& q = P.exponents.q();
  const auto& mu = P.weight.mu();
  const Torus& m = P.torus;
  const std::size_t n = u.size();
  using detail::pos_pow;
  EnergyBreakdown e;
  e.grad_p_term = detail::reduce_nodes(n, [&](std::size_t i) { return pos_pow(G[i], p[i]) / p[i] * m.node_weight(i); });
  e.grad_q_term =
      detail::reduce_nodes(n, [&](std::size_t i) { return mu[i] * pos_pow(G[i], q[i]) / q[i] * m.node_weight(i); });
  e.lambda_q_term = detail::reduce_nodes(n, [&](std::size_t i) {
    return P.lambda * pos_pow(std::abs(detail::lower_arg(u[i], mode)), q[i]) / q[i] * m.node_weight(i);
  });
  e.u_p_term = detail::reduce_nodes(n, [&](std::size_t i) {
    return pos_pow(std::abs(detail::lower_arg(u[i], mode)), p[i]) / p[i] * m.node_weight(i);
  });
  e.F_term = detail::reduce_nodes(
      n, [&](std::size_t i) { return P.nonlinearity.F(i, detail::lower_arg(u[i], mode)) * m.node_weight(i); });
  e.total = e.grad_p_term + e.grad_q_term - e.lambda_q_term + e.u_p_term - e.F_term;
  return e;
}

/// <J'(u), phi>; zero for every phi exactly when u is a discrete weak solution.
inline double gateaux(const ProblemInstance& P, const ScalarField& u, const ScalarField& phi,
                      SourceMode mode = SourceMode::full) {
  require_same_chart(u, P.torus);
  require_same_chart(phi, P.torus);
  const VectorField du = gradient(u);
  const VectorField dphi = gradient(phi);
  const MetricField& g = *P.torus.metric;
  const auto& p = P.exponents.p();
  const auto& q = P.exponents.q();
  const auto& mu = P.weight.mu();
  const int dim = u.chart->dim();
  return detail::reduce_nodes(u.size(), [&](std::size_t i) {
    const double* a = du.values.data() + i * static_cast<std::size_t>(dim);
    const double* b = dphi.values.data() + i * static_cast<std::size_t>(dim);
    const double r = std::sqrt(std::max(0.0, metric_square(g, i, a)));
    double inner = 0.0;
    if (g.is_identity()) {
      for (int k = 0; k < dim; ++k) inner += a[k] * b[k];
    } else {
      const auto& inv = g.inv(i);
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) inner += inv[k * dim + l] * a[k] * b[l];
    }
    const double s = detail::lower_arg(u[i], mode);
    const double as = std::abs(s);
    const double lower = -P.lambda * detail::flux_density(as, q[i]) * s + detail::flux_density(as, p[i]) * s -
                         P.nonlinearity.f(i, s);
    const double flux = detail::flux_density(r, p[i]) + mu[i] * detail::flux_density(r, q[i]);
    return (flux * inner + lower * phi[i]) * P.torus.node_weight(i);
  });
}

struct Residual {
  ScalarField field;  // r_i = <J'(u), delta_i> / w_i
  double norm = 0.0;  // Euclidean norm of the node vector
};

/// Riesz representative of J'(u) in the quadrature inner product.
inline Residual residual_gradient(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full) {
  require_same_chart(u, P.torus);
  const Chart& c = *u.chart;
  const MetricField& g = *P.torus.metric;
  const int dim = c.dim();
  const auto& p = P.exponents.p();
  const auto& q = P.exponents.q();
  const auto& mu = P.weight.mu();
  const VectorField du = gradient(u);
  const std::size_t n = u.size();

  // weighted contravariant flux w_i (r^{p-2} + mu r^{q-2}) g^{ab} d_b u
  std::vector<double> flux(n * static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    const double* a = du.values.data() + i * static_cast<std::size_t>(dim);
    const double r = std::sqrt(std::max(0.0, metric_square(g, i, a)));
    const double dens = (detail::flux_density(r, p[i]) + mu[i] * detail::flux_density(r, q[i])) * g.node_weight(i);
    for (int k = 0; k < dim; ++k) {
      double up = a[k];
      if (!g.is_identity()) {
        up = 0.0;
        for (int l = 0; l < dim; ++l) up += g.inv(i)[k * dim + l] * a[l];
      }
      flux[i * static_cast<std::size_t>(dim) + k] = dens * up;
    }
  }
  Residual res{ScalarField(u.chart), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) {
      const std::size_t back = c.neighbor(j, k, -1), fwd = c.neighbor(j, k, 1);
      acc += (flux[back * static_cast<std::size_t>(dim) + k] - flux[fwd * static_cast<std::size_t>(dim) + k]) /
             (2.0 * c.spacing(k));
    }
    const double s = detail::lower_arg(u[j], mode);
    const double as = std::abs(s);
    const double lower = -P.lambda * detail::flux_density(as, q[j]) * s + detail::flux_density(as, p[j]) * s -
                         P.nonlinearity.f(j, s);
    res.field[j] = acc / g.node_weight(j) + lower;
  }
  double ss = 0.0;
  for (double x : res.field.values) ss += x * x;
  res.norm = std::sqrt(ss);
  return res;
}

}  // namespace nehari
