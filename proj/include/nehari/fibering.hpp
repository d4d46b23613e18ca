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

// The Nehari constraint psi(u) = <J'(u), u>, fibering maps along rays t u,
// their classification into N+, N- and N0, and projection onto the Nehari
// set by one-dimensional root finding.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nehari/doublephase.hpp"

namespace nehari {

enum class NehariClass { Plus, Minus, Zero };

inline const char* to_string(NehariClass c) {
  switch (c) {
    case NehariClass::Plus:
      return "Plus";
    case NehariClass::Minus:
      return "Minus";
    case NehariClass::Zero:
      return "Zero";
  }
  return "?";
}

inline constexpr double kClassTolerance = 1e-9;
inline constexpr double kMembershipTolerance = 1e-8;
inline constexpr double kRootTolerance = 1e-10;

/// Precomputed per-node coefficients of the ray t -> t u:
///   phi(t) = sum_i [ t^{p_i} (A_i + D_i) + t^{q_i} (mu_i B_i - lambda C_i) ] - int f(x, t u) t u
/// with A = |grad u|^p, B = |grad u|^q, C = |u|^q, D = |u|^p (all weighted by dv_g).
class RayProfile {
public:
  RayProfile(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full)
      : P_(&P), mode_(mode), u_(u) {
    require_same_chart(u, P.torus);
    const ScalarField G = grad_norm_g(u, P.torus);
    const std::size_t n = u.size();
    A_.resize(n);
    B_.resize(n);
    C_.resize(n);
    D_.resize(n);
    E_.resize(n);
    const auto& p = P.exponents.p();
    const auto& q = P.exponents.q();
    for (std::size_t i = 0; i < n; ++i) {
      const double w = P.torus.node_weight(i);
      const double s = std::abs(detail::lower_arg(u[i], mode));
      A_[i] = detail::pos_pow(G[i], p[i]) * w;
      B_[i] = detail::pos_pow(G[i], q[i]) * w;
      C_[i] = detail::pos_pow(s, q[i]) * w;
      D_[i] = detail::pos_pow(s, p[i]) * w;
      E_[i] = P.nonlinearity.is_power() ? P.nonlinearity.fs(i, detail::lower_arg(u[i], mode)) * w : 0.0;
    }
    uniform_ = P.nonlinearity.is_power() && p.min() == p.max() && q.min() == q.max();
    if (uniform_) {
      const auto& mu = P.weight.mu();
      p0_ = p[0];
      q0_ = q[0];
      sum_pd_ = detail::reduce_nodes(n, [&](std::size_t i) { return A_[i] + D_[i]; });
      sum_qd_ = detail::reduce_nodes(n, [&](std::size_t i) { return mu[i] * B_[i] - P.lambda * C_[i]; });
      sum_qa_ = detail::reduce_nodes(n, [&](std::size_t i) { return mu[i] * B_[i] + P.lambda * C_[i]; });
      sum_e_ = detail::reduce_nodes(n, [&](std::size_t i) { return E_[i]; });
    }
  }

  /// phi_u(t) = <J'(t u), t u>
  double phi(double t) const {
    if (uniform_)
      return std::pow(t, p0_) * sum_pd_ + std::pow(t, q0_) * sum_qd_ -
             std::pow(t, P_->nonlinearity.beta()) * sum_e_;
    return detail::reduce_nodes(A_.size(), [&](std::size_t i) { return node_phi(i, t); });
  }

  /// Exact derivative of phi_u in t.
  double dphi(double t) const {
    if (uniform_) {
      const double beta = P_->nonlinearity.beta();
      return p0_ * std::pow(t, p0_ - 1.0) * sum_pd_ + q0_ * std::pow(t, q0_ - 1.0) * sum_qd_ -
             beta * std::pow(t, beta - 1.0) * sum_e_;
    }
    return detail::reduce_nodes(A_.size(), [&](std::size_t i) { return node_dphi(i, t); });
  }

  /// |A| + mu|B| + lambda|C| + |D| + |E| evaluated at t u.
  double scale(double t) const {
    const auto& p = P_->exponents.p();
    const auto& q = P_->exponents.q();
    const auto& mu = P_->weight.mu();
    if (uniform_)
      return std::pow(t, p0_) * sum_pd_ + std::pow(t, q0_) * sum_qa_ +
             std::pow(t, P_->nonlinearity.beta()) * sum_e_;
    return detail::reduce_nodes(A_.size(), [&](std::size_t i) {
      const double tp = std::pow(t, p[i]), tq = std::pow(t, q[i]);
      return tp * (A_[i] + D_[i]) + tq * (mu[i] * B_[i] + P_->lambda * C_[i]) + std::abs(source_fs(i, t));
    });
  }

  const ScalarField& direction() const { return u_; }
  SourceMode mode() const { return mode_; }

private:
  // int f(x, t u) t u at node i, weighted
  double source_fs(std::size_t i, double t) const {
    if (P_->nonlinearity.is_power()) return std::pow(t, P_->nonlinearity.beta()) * E_[i];
    const double s = t * detail::lower_arg(u_[i], mode_);
    return P_->nonlinearity.fs(i, s) * P_->torus.node_weight(i);
  }
  double source_dfs(std::size_t i, double t) const {
    const double beta = P_->nonlinearity.beta();
    if (P_->nonlinearity.is_power()) return beta * std::pow(t, beta - 1.0) * E_[i];
    const double v = detail::lower_arg(u_[i], mode_);
    return P_->nonlinearity.dfs(i, t * v) * v * P_->torus.node_weight(i);
  }
  double node_phi(std::size_t i, double t) const {
    const double p = P_->exponents.p()[i], q = P_->exponents.q()[i];
    return std::pow(t, p) * (A_[i] + D_[i]) + std::pow(t, q) * (P_->weight[i] * B_[i] - P_->lambda * C_[i]) -
           source_fs(i, t);
  }
  double node_dphi(std::size_t i, double t) const {
    const double p = P_->exponents.p()[i], q = P_->exponents.q()[i];
    return p * std::pow(t, p - 1.0) * (A_[i] + D_[i]) +
           q * std::pow(t, q - 1.0) * (P_->weight[i] * B_[i] - P_->lambda * C_[i]) - source_dfs(i, t);
  }

  const ProblemInstance* P_;
  SourceMode mode_;
  ScalarField u_;
  std::vector<double> A_, B_, C_, D_, E_;
  // constant exponents with a power source: node sums collapse
  bool uniform_ = false;
  double p0_ = 0.0, q0_ = 0.0;
  double sum_pd_ = 0.0, sum_qd_ = 0.0, sum_qa_ = 0.0, sum_e_ = 0.0;
};

/// psi(u) = int |grad u|^p + mu |grad u|^q - lambda |u|^q + |u|^p - f(x,u) u.
inline double psi(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full) {
  return RayProfile(P, u, mode).phi(1.0);
}

/// Sum of absolute values of the five integrals of psi at u.
inline double psi_scale(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full) {
  return RayProfile(P, u, mode).scale(1.0);
}

struct FiberingSample {
  std::vector<double> t_values;
  std::vector<double> phi;
  std::vector<double> phi_prime;
};

inline FiberingSample fibering(const ProblemInstance& P, const ScalarField& u, const std::vector<double>& t_grid,
                               SourceMode mode = SourceMode::full) {
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > 0.0)) throw Error("fibering grid must be positive");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw Error("fibering grid must increase strictly");
  }
  const RayProfile ray(P, u, mode);
  FiberingSample s;
  s.t_values = t_grid;
  for (double t : t_grid) {
    s.phi.push_back(ray.phi(t));
    s.phi_prime.push_back(ray.dphi(t));
  }
  return s;
}

/// n points spaced evenly in log t over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < n; ++k) t[static_cast<std::size_t>(k)] = std::exp(a + (b - a) * k / (n - 1));
  t.front() = lo;
  t.back() = hi;
  return t;
}

struct NehariRoot {
  double t = 0.0;
  NehariClass klass = NehariClass::Zero;
  double phi = 0.0;     // phi_u(t) after refinement
  double dphi = 0.0;    // phi_u'(t)
  double scale = 0.0;   // five-integral scale at t u
  double sign = 0.0;    // t phi_u'(t) = <psi'(t u), t u>
  bool refined = true;  // |phi| <= 1e-10 scale reached
};

struct Projection {
  std::vector<NehariRoot> roots;  // increasing t
  bool no_root = false;
  std::string diagnostics;

  std::optional<NehariRoot> first(NehariClass c) const {
    for (const auto& r : roots)
      if (r.klass == c) return r;
    return std::nullopt;
  }
};

struct ProjectOptions {
  double t_min = 1e-6;
  double t_max = 1e6;
  int probes = 256;
};

namespace detail {

inline NehariClass class_of(double sign, double scale) {
  const double tol = kClassTolerance * scale;
  if (sign > tol) return NehariClass::Plus;
  if (sign < -tol) return NehariClass::Minus;
  return NehariClass::Zero;
}

/// Bisection on [lo, hi] with phi(lo), phi(hi) of opposite signs.
inline NehariRoot refine_root(const RayProfile& ray, double lo, double hi, double flo) {
  double best_t = lo, best_f = flo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double fm = ray.phi(mid);
    if (std::abs(fm) < std::abs(best_f)) {
      best_t = mid;
      best_f = fm;
    }
    if (fm == 0.0) break;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double fhi = ray.phi(hi);
  if (std::abs(fhi) < std::abs(best_f)) {
    best_t = hi;
    best_f = fhi;
  }
  NehariRoot r;
  r.t = best_t;
  r.phi = best_f;
  r.dphi = ray.dphi(best_t);
  r.scale = ray.scale(best_t);
  r.sign = best_t * r.dphi;
  r.klass = class_of(r.sign, r.scale);
  r.refined = std::abs(best_f) <= kRootTolerance * r.scale;
  return r;
}

}  // namespace detail

/// All roots of phi_u on a log-spaced bracket, refined and classified.
inline Projection project(const RayProfile& ray, const ProjectOptions& opt = {}) {
  Projection out;
  const std::vector<double> t = log_grid(opt.t_min, opt.t_max, opt.probes);
  std::vector<double> f(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) f[k] = ray.phi(t[k]);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    if (f[k] == 0.0) {
      NehariRoot r = detail::refine_root(ray, t[k], t[k], 0.0);
      out.roots.push_back(r);
      continue;
    }
    if (f[k + 1] != 0.0 && (f[k] < 0.0) != (f[k + 1] < 0.0))
      out.roots.push_back(detail::refine_root(ray, t[k], t[k + 1], f[k]));
  }
  if (out.roots.empty()) {
    out.no_root = true;
    out.diagnostics = "no root: phi_u keeps sign " + std::string(f.front() < 0.0 ? "-" : "+") + " on [" +
                      std::to_string(opt.t_min) + ", " + std::to_string(opt.t_max) + "], phi(t_min) = " +
                      std::to_string(f.front()) + ", phi(t_max) = " + std::to_string(f.back());
  }
  return out;
}

inline Projection project(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full,
                          const ProjectOptions& opt = {}) {
  bool nonzero = false;
  for (double x : u.values) nonzero = nonzero || x != 0.0;
  if (!nonzero) throw Error("cannot project the zero field");
  return project(RayProfile(P, u, mode), opt);
}

/// Sign class of <psi'(u), u> for u on the Nehari set.
inline NehariClass classify(const ProblemInstance& P, const ScalarField& u, SourceMode mode = SourceMode::full) {
  const RayProfile ray(P, u, mode);
  const double scale = ray.scale(1.0);
  const double value = ray.phi(1.0);
  if (!(std::abs(value) <= kMembershipTolerance * scale))
    throw Error("not on Nehari manifold (psi = " + std::to_string(value) + ", scale = " + std::to_string(scale) + ")");
  return detail::class_of(ray.dphi(1.0), scale);
}

/// The smallness thresholds for lambda and the constants they were built from.
struct Thresholds {
  double lambda_star = 0.0;
  double lambda_star_raw = 0.0;
  bool lambda_star_clamped = false;
  double lambda_star_star = 0.0;
  bool lambda_star_star_degenerate = false;
  double lambda_bar = 0.0;
  double mu0 = 0.0;
  ExponentBounds bounds{};
  ConstantsEstimate constants;
};

inline Thresholds thresholds(const ExponentBounds& b, double mu0, const ConstantsEstimate& c) {
  if (!(c.c_poincare > 0.0 && c.D_embed > 0.0 && c.c1_embed > 0.0 && mu0 > 0.0))
    throw Error("thresholds need positive constants");
  Thresholds th;
  th.mu0 = mu0;
  th.bounds = b;
  th.constants = c;
  const double K = std::pow(c.D_embed, b.p_plus) * std::pow(c.c_poincare + 1.0, b.p_plus);
  const double pq = b.p_plus - b.q_plus;
  const double pqm = b.p_plus - b.q_minus;

  th.lambda_star_star = mu0 * b.q_minus * pq / (K * b.q_plus * pqm);
  if (!(th.lambda_star_star > 0.0)) {
    th.lambda_star_star = 0.0;
    th.lambda_star_star_degenerate = true;
  }
  th.lambda_star_raw = 2.0 * mu0 * pq / (K * pqm) -
                       mu0 * c.c1_embed * (b.q_plus - b.q_minus) * pq / (K * pqm * (b.p_minus - b.q_minus)) -
                       b.p_plus / pqm;
  th.lambda_star = th.lambda_star_raw;
  if (!(th.lambda_star > 0.0)) {
    th.lambda_star = 0.0;
    th.lambda_star_clamped = true;
  }
  th.lambda_bar = std::min(th.lambda_star, th.lambda_star_star);
  return th;
}

inline Thresholds thresholds(const ProblemInstance& P, const ConstantsEstimate& c) {
  return thresholds(P.exponents.bounds(), P.weight.mu0(), c);
}

}  // namespace nehari
