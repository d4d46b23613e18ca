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

// Variable-exponent Lebesgue and Sobolev machinery on a discrete torus:
// modulars rho_e(u) = int |u|^{e(x)} dv_g, Luxemburg norms, the weighted
// analogs with weight mu, and executable forms of the standard inequalities
// relating them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nehari/manifold.hpp"
#include "nehari/random.hpp"
#include "nehari/sampling.hpp"

namespace nehari {

/// Extrema of a pair of exponents.
struct ExponentBounds {
  double p_minus, p_plus, q_minus, q_plus;
};

/// The exponent pair p(.), q(.) with 1 < q- <= q+ < p- <= p+.
class ExponentField {
public:
  ExponentField(ScalarField p, ScalarField q) : p_(std::move(p)), q_(std::move(q)) {
    if (!p_.chart->same_shape(*q_.chart)) throw Error("exponents p and q live on different charts");
    if (!p_.all_finite() || !q_.all_finite()) throw Error("exponents must be finite");
    bounds_ = {p_.min(), p_.max(), q_.min(), q_.max()};
    if (!(1.0 < bounds_.q_minus && bounds_.q_plus < bounds_.p_minus))
      throw Error("exponents violate 1 < q- <= q+ < p- <= p+ (q- = " + std::to_string(bounds_.q_minus) +
                  ", q+ = " + std::to_string(bounds_.q_plus) + ", p- = " + std::to_string(bounds_.p_minus) + ")");
  }

  const ScalarField& p() const { return p_; }
  const ScalarField& q() const { return q_; }
  const ExponentBounds& bounds() const { return bounds_; }
  double p_minus() const { return bounds_.p_minus; }
  double p_plus() const { return bounds_.p_plus; }
  double q_minus() const { return bounds_.q_minus; }
  double q_plus() const { return bounds_.q_plus; }

private:
  ScalarField p_, q_;
  ExponentBounds bounds_;
};

/// Positive weight mu(.) with mu0 = min mu > 0.
class WeightField {
public:
  explicit WeightField(ScalarField mu) : mu_(std::move(mu)) {
    if (!mu_.all_finite()) throw Error("weight must be finite");
    mu0_ = mu_.min();
    if (!(mu0_ > 0.0)) throw Error("weight must be bounded below by a positive mu0");
  }
  const ScalarField& mu() const { return mu_; }
  double mu0() const { return mu0_; }
  double operator[](std::size_t i) const { return mu_[i]; }

private:
  ScalarField mu_;
  double mu0_ = 0.0;
};

namespace detail {

inline void require_exponent(const ScalarField& e) {
  for (double x : e.values)
    if (!(x > 1.0)) throw Error("exponent must exceed 1 at every node");
}

inline double weighted_power_sum(const ScalarField& u, const ScalarField& e, const ScalarField* mu, const Torus& m,
                                 double scale) {
  return reduce_nodes(u.size(), [&](std::size_t i) {
    const double a = std::abs(u[i]) * scale;
    const double base = a == 0.0 ? 0.0 : std::pow(a, e[i]);
    return (mu ? (*mu)[i] : 1.0) * base * m.node_weight(i);
  });
}

}  // namespace detail

inline double modular(const ScalarField& u, const ScalarField& e, const Torus& m) {
  require_same_chart(u, m);
  require_same_chart(e, m);
  return detail::weighted_power_sum(u, e, nullptr, m, 1.0);
}

inline double weighted_modular(const ScalarField& u, const ScalarField& e, const WeightField& w, const Torus& m) {
  require_same_chart(u, m);
  require_same_chart(e, m);
  return detail::weighted_power_sum(u, e, &w.mu(), m, 1.0);
}

struct LuxemburgOptions {
  double rel_tol = 1e-12;
  int max_iter = 200;
};

namespace detail {

/// inf{gamma > 0 : rho(u/gamma) <= 1} by bisection on a bracket that is
/// valid for any exponent with 1 < e- <= e <= e+.
inline double luxemburg(const ScalarField& u, const ScalarField& e, const ScalarField* mu, const Torus& m,
                        const LuxemburgOptions& opt) {
  double top = 0.0;
  for (double x : u.values) top = std::max(top, std::abs(x));
  if (top == 0.0) return 0.0;
  const double e_minus = e.min(), e_plus = e.max();
  const double vol = mu ? reduce_nodes(u.size(), [&](std::size_t i) { return (*mu)[i] * m.node_weight(i); })
                        : volume(m);
  auto rho = [&](double gamma) { return weighted_power_sum(u, e, mu, m, 1.0 / gamma); };

  double lo = top * std::pow(vol, 1.0 / e_plus) * 1e-8;
  double hi = top * std::pow(1.0 + vol, 1.0 / e_minus);
  for (int guard = 0; rho(lo) <= 1.0 && guard < 64; ++guard) lo *= 1e-4;
  for (int guard = 0; rho(hi) > 1.0 && guard < 64; ++guard) hi *= 1e4;

  for (int it = 0; it < opt.max_iter && hi - lo > opt.rel_tol * hi; ++it) {
    // geometric midpoint while the bracket spans orders of magnitude
    const double mid = hi > 2.0 * lo ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (rho(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  // Newton polish on rho(u/gamma) = 1 inside the final bracket
  double g = 0.5 * (lo + hi);
  double err = rho(g) - 1.0;
  for (int it = 0; it < 4 && err != 0.0; ++it) {
    const double slope = -reduce_nodes(u.size(), [&](std::size_t i) {
                           const double a = std::abs(u[i]) / g;
                           return a == 0.0 ? 0.0 : (mu ? (*mu)[i] : 1.0) * e[i] * std::pow(a, e[i]) * m.node_weight(i);
                         }) / g;
    if (!(slope < 0.0)) break;
    const double gn = g - err / slope;
    if (!(gn >= lo && gn <= hi)) break;
    const double en = rho(gn) - 1.0;
    if (!(std::abs(en) < std::abs(err))) break;
    g = gn;
    err = en;
  }
  return g;
}

}  // namespace detail

inline double luxemburg_norm(const ScalarField& u, const ScalarField& e, const Torus& m,
                             const LuxemburgOptions& opt = {}) {
  require_same_chart(u, m);
  detail::require_exponent(e);
  return detail::luxemburg(u, e, nullptr, m, opt);
}

inline double weighted_norm(const ScalarField& u, const ScalarField& e, const WeightField& w, const Torus& m,
                            const LuxemburgOptions& opt = {}) {
  require_same_chart(u, m);
  detail::require_exponent(e);
  return detail::luxemburg(u, e, &w.mu(), m, opt);
}

/// Nodewise e' = e/(e-1), with e clamped to at least 1 + 1e-6.
inline ScalarField conjugate_exponent(const ScalarField& e) {
  ScalarField out = e;
  for (double& x : out.values) {
    const double c = std::max(x, 1.0 + 1e-6);
    x = c / (c - 1.0);
  }
  return out;
}

/// 1 + 1/e- + 1/e+.
inline double holder_constant(double e_minus, double e_plus) { return 1.0 + 1.0 / e_minus + 1.0 / e_plus; }
/// 1 + 1/e- - 1/e+, the constant a direct Young-inequality argument yields.
inline double holder_constant_tight(double e_minus, double e_plus) { return 1.0 + 1.0 / e_minus - 1.0 / e_plus; }

struct HolderCheck {
  double lhs = 0.0;        // int |u v| dv_g
  double rhs = 0.0;        // r_q ||u||_e ||v||_e'
  double r_q = 0.0;
  double rhs_tight = 0.0;  // same with 1 + 1/e- - 1/e+
  bool pass = false;
  bool pass_tight = false;
};

inline HolderCheck holder_check(const ScalarField& u, const ScalarField& v, const ScalarField& e, const Torus& m,
                                std::optional<double> r_q_override = std::nullopt) {
  require_same_chart(u, m);
  require_same_chart(v, m);
  HolderCheck h;
  h.lhs = detail::reduce_nodes(u.size(), [&](std::size_t i) { return std::abs(u[i] * v[i]) * m.node_weight(i); });
  const double nu = luxemburg_norm(u, e, m);
  const double nv = luxemburg_norm(v, conjugate_exponent(e), m);
  h.r_q = r_q_override.value_or(holder_constant(e.min(), e.max()));
  h.rhs = h.r_q * nu * nv;
  h.rhs_tight = holder_constant_tight(e.min(), e.max()) * nu * nv;
  h.pass = h.lhs <= h.rhs + 1e-12;
  h.pass_tight = h.lhs <= h.rhs_tight + 1e-12;
  return h;
}

/// One inequality lhs <= rhs. margin = (rhs - lhs) / max(1, |lhs|, |rhs|).
struct Clause {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool applicable = true;
};

inline Clause make_clause(std::string name, double lhs, double rhs) {
  const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  return {std::move(name), lhs, rhs, (rhs - lhs) / scale, true};
}

struct ModularNormReport {
  double norm = 0.0;
  double modular = 0.0;
  double e_minus = 0.0, e_plus = 0.0;
  std::vector<Clause> clauses;
  bool pass = true;
  std::string failed;  // first failing clause with values, empty on pass

  double min_margin() const {
    double mm = std::numeric_limits<double>::infinity();
    for (const auto& c : clauses)
      if (c.applicable) mm = std::min(mm, c.margin);
    return mm;
  }
};

namespace detail {

inline ModularNormReport relations(double norm, double rho, double e_minus, double e_plus, double tol, double band) {
  ModularNormReport r{norm, rho, e_minus, e_plus, {}, true, {}};
  // (i) norm and modular sit on the same side of 1
  {
    const int sn = norm < 1.0 - band ? -1 : (norm > 1.0 + band ? 1 : 0);
    const int sr = rho < 1.0 - band ? -1 : (rho > 1.0 + band ? 1 : 0);
    const bool ok = sn == sr || sn == 0 || sr == 0;
    Clause c{"(i) trichotomy", static_cast<double>(sn), static_cast<double>(sr), ok ? 0.0 : -1.0, true};
    r.clauses.push_back(c);
  }
  if (norm < 1.0) {
    r.clauses.push_back(make_clause("(ii) norm^e+ <= rho", std::pow(norm, e_plus), rho));
    r.clauses.push_back(make_clause("(ii) rho <= norm^e-", rho, std::pow(norm, e_minus)));
  } else {
    r.clauses.push_back(make_clause("(iii) norm^e- <= rho", std::pow(norm, e_minus), rho));
    r.clauses.push_back(make_clause("(iii) rho <= norm^e+", rho, std::pow(norm, e_plus)));
  }
  const double a = std::pow(rho, 1.0 / e_minus), b = std::pow(rho, 1.0 / e_plus);
  r.clauses.push_back(make_clause("sandwich min(rho^1/e-, rho^1/e+) <= norm", std::min(a, b), norm));
  r.clauses.push_back(make_clause("sandwich norm <= max(rho^1/e-, rho^1/e+)", norm, std::max(a, b)));
  for (const auto& c : r.clauses)
    if (c.applicable && c.margin < -tol) {
      r.pass = false;
      r.failed = c.name + ": lhs=" + std::to_string(c.lhs) + " rhs=" + std::to_string(c.rhs);
      break;
    }
  return r;
}

}  // namespace detail

/// Checks the norm/modular relations for u != 0: the trichotomy, the
/// power bounds on either side of 1, and the min/max sandwich.
inline ModularNormReport modular_norm_relations(const ScalarField& u, const ScalarField& e, const Torus& m,
                                                double tol = 1e-12) {
  const double norm = luxemburg_norm(u, e, m);
  if (norm == 0.0) throw Error("modular/norm relations need u != 0");
  return detail::relations(norm, modular(u, e, m), e.min(), e.max(), tol, 1e-9);
}

inline ModularNormReport weighted_norm_relations(const ScalarField& u, const ScalarField& e, const WeightField& w,
                                                 const Torus& m, double tol = 1e-12) {
  const double norm = weighted_norm(u, e, w, m);
  if (norm == 0.0) throw Error("modular/norm relations need u != 0");
  return detail::relations(norm, weighted_modular(u, e, w, m), e.min(), e.max(), tol, 1e-9);
}

/// ||u||_e + || |grad u|_g ||_e.
inline double sobolev_norm(const ScalarField& u, const ScalarField& e, const Torus& m) {
  return luxemburg_norm(u, e, m) + luxemburg_norm(grad_norm_g(u, m), e, m);
}

/// ||u||_q / ||grad u||_q for a zero-mean u.
inline double poincare_ratio(const ScalarField& u, const ScalarField& q, const Torus& m) {
  const double den = luxemburg_norm(grad_norm_g(u, m), q, m);
  return den > 0.0 ? luxemburg_norm(u, q, m) / den : 0.0;
}

/// ||u||_p / ||u||_{1,q}.
inline double embedding_ratio(const ScalarField& u, const ExponentField& ex, const Torus& m) {
  const double den = sobolev_norm(u, ex.q(), m);
  return den > 0.0 ? luxemburg_norm(u, ex.p(), m) / den : 0.0;
}

/// Weighted modular rho_{q,mu}(u) after normalizing u to ||u||_{1,q} = 1.
inline double weighted_embedding_ratio(const ScalarField& u, const ExponentField& ex, const WeightField& w,
                                       const Torus& m) {
  const double den = sobolev_norm(u, ex.q(), m);
  return den > 0.0 ? weighted_modular(scaled(u, 1.0 / den), ex.q(), w, m) : 0.0;
}

/// Finite-dimensional lower estimates of the Poincare constant c, the
/// embedding constant D of W^{1,q} into L^p, and the weighted embedding
/// constant c1.
struct ConstantsEstimate {
  double c_poincare = 0.0;
  double D_embed = 0.0;
  double c1_embed = 0.0;
  double r_q = 0.0;
  std::uint64_t seed = 0;
  int trials = 0;
  int refinements = 0;
  std::string method = "seeded band-limited sampling, max over trials plus hill-climb on running records";
};

struct EstimateOptions {
  int refine_steps = 40;
};

namespace detail {

/// Greedy ascent of ratio() from `start` using seeded band-limited
/// perturbations; returns the best ratio seen.
template <class Ratio, class Prepare>
double refine(const ScalarField& start, double start_value, RandomStream rng, int steps, Ratio&& ratio,
              Prepare&& prepare) {
  ScalarField cur = start;
  double best = start_value;
  double step = 0.25;
  double scale = 0.0;
  for (double x : start.values) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return best;
  for (int s = 0; s < steps; ++s) {
    BandLimitedOptions opt;
    opt.amplitude = step * scale;
    opt.random_cutoff = true;
    ScalarField cand = prepare(combine(1.0, cur, 1.0, random_band_limited(start.chart, rng, opt)));
    const double r = ratio(cand);
    if (r > best) {
      best = r;
      cur = std::move(cand);
    } else {
      step *= 0.7;
    }
  }
  return best;
}

}  // namespace detail

inline ConstantsEstimate estimate_constants(const ExponentField& ex, const WeightField& w, const Torus& m, int trials,
                                            std::uint64_t seed, const EstimateOptions& opt = {}) {
  if (trials < 100) throw Error("constant estimation needs at least 100 trials");
  ConstantsEstimate est;
  est.seed = seed;
  est.trials = trials;
  est.r_q = holder_constant(ex.q_minus(), ex.q_plus());

  const RandomStream root(seed, 0x636f6e737473ULL);
  auto zm = [&](const ScalarField& u) { return zero_mean(u, m); };
  auto same = [](const ScalarField& u) { return u; };
  auto pr = [&](const ScalarField& u) { return poincare_ratio(u, ex.q(), m); };
  auto er = [&](const ScalarField& u) { return embedding_ratio(u, ex, m); };
  auto wr = [&](const ScalarField& u) { return weighted_embedding_ratio(u, ex, w, m); };

  // Records are taken in trial order, so the record set for T trials is a
  // prefix of the one for 2T trials and the estimates are monotone in T.
  double rec_c = 0.0, rec_d = 0.0, rec_w = 0.0;
  for (int t = 0; t < trials; ++t) {
    RandomStream rng = root.split(static_cast<std::uint64_t>(t));
    BandLimitedOptions bo;
    bo.mean_sd = 1.0;
    bo.amplitude = std::pow(10.0, rng.uniform(-3.0, 0.0));
    const ScalarField u = random_band_limited(m.chart, rng, bo);
    const ScalarField u0 = zero_mean(u, m);

    const double c = pr(u0);
    if (c > rec_c) {
      rec_c = c;
      est.c_poincare = std::max({est.c_poincare, c, detail::refine(u0, c, rng.split(1), opt.refine_steps, pr, zm)});
      ++est.refinements;
    }
    const double d = er(u);
    if (d > rec_d) {
      rec_d = d;
      est.D_embed = std::max({est.D_embed, d, detail::refine(u, d, rng.split(2), opt.refine_steps, er, same)});
      ++est.refinements;
    }
    const double c1 = wr(u);
    if (c1 > rec_w) {
      rec_w = c1;
      est.c1_embed = std::max({est.c1_embed, c1, detail::refine(u, c1, rng.split(3), opt.refine_steps, wr, same)});
      ++est.refinements;
    }
  }
  return est;
}

/// Estimates from an explicit trial set, without refinement.
inline ConstantsEstimate estimate_constants_from(const std::vector<ScalarField>& fields, const ExponentField& ex,
                                                 const WeightField& w, const Torus& m) {
  ConstantsEstimate est;
  est.trials = static_cast<int>(fields.size());
  est.r_q = holder_constant(ex.q_minus(), ex.q_plus());
  est.method = "explicit trial set";
  for (const auto& u : fields) {
    est.c_poincare = std::max(est.c_poincare, poincare_ratio(zero_mean(u, m), ex.q(), m));
    est.D_embed = std::max(est.D_embed, embedding_ratio(u, ex, m));
    est.c1_embed = std::max(est.c1_embed, weighted_embedding_ratio(u, ex, w, m));
  }
  return est;
}

}  // namespace nehari
