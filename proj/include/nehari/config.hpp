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

// Run configuration: a sectioned key = value text file.
//
//   [chart]      dim, sizes, lengths, metric
//   [exponents]  p, q                      field specs
//   [weight]     mu                        field spec
//   [problem]    lambda, beta, a, A_threshold
//   [constants]  trials
//   [solver]     SolverConfig members
//   [sweep]      lambdas
//   [verify]     trials, derivative_trials
//   [output]     dir
//   [run]        seed
//
// Field specs: a number; `affine c0 c1 .. cn` (c0 + sum c_a x_a);
// `fourier c0 sin:axis:k:amp cos:axis:k:amp ..` (c0 + sum amp sin(2 pi k x_a / L_a));
// `file PATH` (a nehari-field v1 file). lambda is a number or `relative r`
// (r times lambda**); sweep lambdas are a list, or `relative geometric lo hi n`.

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/field_io.hpp"
#include "nehari/properties.hpp"
#include "nehari/solver.hpp"

namespace nehari {

struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

/// Raw sections and keys with their source lines.
class IniFile {
public:
  static IniFile parse(std::istream& is, std::string source) {
    IniFile f;
    f.source_ = std::move(source);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') f.fail(lineno, "unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) f.fail(lineno, "empty section name");
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos) f.fail(lineno, "expected 'key = value'");
      if (section.empty()) f.fail(lineno, "key outside of any section");
      const std::string key = trim(t.substr(0, eq));
      const std::string value = trim(t.substr(eq + 1));
      if (key.empty()) f.fail(lineno, "empty key");
      auto& sec = f.entries_[section];
      if (sec.count(key)) f.fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
      sec[key] = {value, lineno};
    }
    return f;
  }

  static IniFile load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config '" + path + "'");
    return parse(is, path);
  }

  const ConfigEntry* find(const std::string& section, const std::string& key) const {
    auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  /// Throws on any section or key outside `allowed`.
  void require_known(const std::map<std::string, std::vector<std::string>>& allowed) const {
    for (const auto& [section, keys] : entries_) {
      auto a = allowed.find(section);
      for (const auto& [key, entry] : keys) {
        if (a == allowed.end()) fail(entry.line, "unknown section [" + section + "]");
        if (std::find(a->second.begin(), a->second.end(), key) == a->second.end())
          fail(entry.line, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw Error(source_ + ":" + std::to_string(line) + ": " + what);
  }
  const std::string& source() const { return source_; }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

private:
  std::string source_;
  std::map<std::string, std::map<std::string, ConfigEntry>> entries_;
};

/// A field spec with the config line it came from.
struct FieldSpec {
  std::string text = "1";
  std::string source;
  std::size_t line = 0;
};

struct LambdaSpec {
  bool relative = false;  // value is a multiple of lambda**
  double value = 0.0;
};

struct LambdaGrid {
  bool relative = false;
  std::vector<double> values;  // absolute, or multiples of lambda**
};

struct RunConfig {
  std::string source;
  std::uint64_t seed = 42;
  int dim = 1;
  std::vector<std::size_t> sizes{64};
  std::vector<double> lengths;
  std::string metric = "identity";
  std::size_t metric_line = 0;
  FieldSpec p{"3", "", 0}, q{"2", "", 0}, mu{"1", "", 0}, a{"1", "", 0};
  double beta = 4.0;
  double A_threshold = 0.0;
  std::optional<LambdaSpec> lambda;
  std::size_t lambda_line = 0;
  std::optional<LambdaGrid> grid;
  std::size_t grid_line = 0;
  int constant_trials = 1000;
  SolverConfig solver;
  VerifyOptions verify;
  std::string out_dir = "out";
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline double to_number(const IniFile& f, std::size_t line, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    f.fail(line, "not a number: '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) f.fail(line, "not a number: '" + tok + "'");
  return v;
}

inline long to_integer(const IniFile& f, std::size_t line, const std::string& tok) {
  const double v = to_number(f, line, tok);
  if (v != std::floor(v) || std::abs(v) > 9e15) f.fail(line, "expected an integer, got '" + tok + "'");
  return static_cast<long>(v);
}

[[noreturn]] inline void spec_error(const FieldSpec& s, const std::string& what) {
  throw Error(s.source + ":" + std::to_string(s.line) + ": " + what);
}

inline double spec_number(const FieldSpec& s, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    spec_error(s, "not a number: '" + tok + "'");
  }
  if (used != tok.size()) spec_error(s, "not a number: '" + tok + "'");
  return v;
}

}  // namespace detail

/// Evaluates a field spec on `chart`.
inline ScalarField evaluate_field_spec(const FieldSpec& s, const ChartPtr& chart) {
  const auto tok = detail::split_ws(s.text);
  if (tok.empty()) detail::spec_error(s, "empty field spec");
  const int n = chart->dim();
  if (tok[0] == "file") {
    if (tok.size() != 2) detail::spec_error(s, "expected 'file PATH'");
    try {
      return read_field(tok[1], chart);
    } catch (const Error& e) {
      detail::spec_error(s, e.what());
    }
  }
  if (tok[0] == "affine") {
    if (tok.size() != static_cast<std::size_t>(n) + 2)
      detail::spec_error(s, "affine spec needs c0 and " + std::to_string(n) + " coefficient(s)");
    std::vector<double> c;
    for (std::size_t k = 1; k < tok.size(); ++k) c.push_back(detail::spec_number(s, tok[k]));
    return sample(chart, [&](std::span<const double> x) {
      double v = c[0];
      for (int a = 0; a < n; ++a) v += c[static_cast<std::size_t>(a) + 1] * x[static_cast<std::size_t>(a)];
      return v;
    });
  }
  if (tok[0] == "fourier") {
    if (tok.size() < 2) detail::spec_error(s, "fourier spec needs a constant term");
    struct Term {
      bool sine;
      int axis;
      double k, amp;
    };
    const double c0 = detail::spec_number(s, tok[1]);
    std::vector<Term> terms;
    for (std::size_t k = 2; k < tok.size(); ++k) {
      std::vector<std::string> parts;
      std::stringstream ss(tok[k]);
      std::string part;
      while (std::getline(ss, part, ':')) parts.push_back(part);
      if (parts.size() != 4 || (parts[0] != "sin" && parts[0] != "cos"))
        detail::spec_error(s, "fourier term must read sin:axis:k:amp or cos:axis:k:amp, got '" + tok[k] + "'");
      const double axis = detail::spec_number(s, parts[1]);
      if (axis != std::floor(axis) || axis < 0 || axis >= n)
        detail::spec_error(s, "fourier axis out of range in '" + tok[k] + "'");
      terms.push_back({parts[0] == "sin", static_cast<int>(axis), detail::spec_number(s, parts[2]),
                       detail::spec_number(s, parts[3])});
    }
    return sample(chart, [&](std::span<const double> x) {
      double v = c0;
      for (const Term& t : terms) {
        const double arg = 2.0 * std::numbers::pi * t.k * x[static_cast<std::size_t>(t.axis)] / chart->length(t.axis);
        v += t.amp * (t.sine ? std::sin(arg) : std::cos(arg));
      }
      return v;
    });
  }
  if (tok.size() != 1) detail::spec_error(s, "unknown field spec '" + s.text + "'");
  return ScalarField(chart, detail::spec_number(s, tok[0]));
}

inline RunConfig parse_config(const IniFile& f) {
  f.require_known({
      {"run", {"seed"}},
      {"chart", {"dim", "sizes", "lengths", "metric"}},
      {"exponents", {"p", "q"}},
      {"weight", {"mu"}},
      {"problem", {"lambda", "beta", "a", "A_threshold"}},
      {"constants", {"trials"}},
      {"solver",
       {"max_outer_iters", "initial_step", "shrink", "sufficient_decrease", "max_backtracks", "projection_tol",
        "residual_stop", "multistart", "start_bias", "start_amplitude", "start_max_mode", "start_halvings"}},
      {"sweep", {"lambdas"}},
      {"verify", {"trials", "derivative_trials"}},
      {"output", {"dir"}},
  });
  RunConfig c;
  c.source = f.source();
  auto num = [&](const char* sec, const char* key, double& out) {
    if (const auto* e = f.find(sec, key)) out = detail::to_number(f, e->line, e->value);
  };
  auto integer = [&](const char* sec, const char* key, auto& out) {
    if (const auto* e = f.find(sec, key)) out = static_cast<std::remove_reference_t<decltype(out)>>(detail::to_integer(f, e->line, e->value));
  };
  auto field = [&](const char* sec, const char* key, FieldSpec& out) {
    if (const auto* e = f.find(sec, key)) out = {e->value, f.source(), e->line};
  };

  if (const auto* e = f.find("run", "seed")) {
    const long s = detail::to_integer(f, e->line, e->value);
    if (s < 0) f.fail(e->line, "seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  integer("chart", "dim", c.dim);
  if (c.dim < 1 || c.dim > kMaxDim) f.fail(f.find("chart", "dim")->line, "dim must be 1, 2 or 3");
  if (const auto* e = f.find("chart", "sizes")) {
    c.sizes.clear();
    for (const auto& t : detail::split_ws(e->value)) {
      const long s = detail::to_integer(f, e->line, t);
      if (s < 4) f.fail(e->line, "each size must be at least 4");
      c.sizes.push_back(static_cast<std::size_t>(s));
    }
  }
  if (c.sizes.size() == 1 && c.dim > 1) c.sizes.assign(static_cast<std::size_t>(c.dim), c.sizes[0]);
  if (c.sizes.size() != static_cast<std::size_t>(c.dim)) {
    const auto* e = f.find("chart", "sizes");
    f.fail(e ? e->line : 0, "sizes must list one entry per axis");
  }
  if (const auto* e = f.find("chart", "lengths")) {
    for (const auto& t : detail::split_ws(e->value)) {
      const double l = detail::to_number(f, e->line, t);
      if (!(l > 0.0)) f.fail(e->line, "lengths must be positive");
      c.lengths.push_back(l);
    }
    if (c.lengths.size() == 1 && c.dim > 1) c.lengths.assign(static_cast<std::size_t>(c.dim), c.lengths[0]);
    if (c.lengths.size() != static_cast<std::size_t>(c.dim)) f.fail(e->line, "lengths must list one entry per axis");
  }
  if (const auto* e = f.find("chart", "metric")) {
    c.metric = e->value;
    c.metric_line = e->line;
  }
  field("exponents", "p", c.p);
  field("exponents", "q", c.q);
  field("weight", "mu", c.mu);
  field("problem", "a", c.a);
  if (c.p.source.empty()) c.p.source = f.source();
  if (c.q.source.empty()) c.q.source = f.source();
  if (c.mu.source.empty()) c.mu.source = f.source();
  if (c.a.source.empty()) c.a.source = f.source();
  num("problem", "beta", c.beta);
  num("problem", "A_threshold", c.A_threshold);
  if (const auto* e = f.find("problem", "lambda")) {
    const auto tok = detail::split_ws(e->value);
    LambdaSpec l;
    if (tok.size() == 2 && tok[0] == "relative") {
      l.relative = true;
      l.value = detail::to_number(f, e->line, tok[1]);
    } else if (tok.size() == 1) {
      l.value = detail::to_number(f, e->line, tok[0]);
    } else {
      f.fail(e->line, "lambda must be a number or 'relative r'");
    }
    if (!(l.value > 0.0)) f.fail(e->line, "lambda must be positive");
    c.lambda = l;
    c.lambda_line = e->line;
  }
  if (const auto* e = f.find("sweep", "lambdas")) {
    auto tok = detail::split_ws(e->value);
    LambdaGrid g;
    if (!tok.empty() && tok[0] == "relative") {
      g.relative = true;
      tok.erase(tok.begin());
    }
    if (!tok.empty() && tok[0] == "geometric") {
      if (tok.size() != 4) f.fail(e->line, "expected 'geometric lo hi n'");
      const double lo = detail::to_number(f, e->line, tok[1]), hi = detail::to_number(f, e->line, tok[2]);
      const long n = detail::to_integer(f, e->line, tok[3]);
      if (!(lo > 0.0 && hi > lo) || n < 2) f.fail(e->line, "geometric grid needs 0 < lo < hi and n >= 2");
      for (long k = 0; k < n; ++k)
        g.values.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1)));
      g.values.back() = hi;
    } else {
      for (const auto& t : tok) g.values.push_back(detail::to_number(f, e->line, t));
    }
    if (g.values.empty()) f.fail(e->line, "empty lambda grid");
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      if (!(g.values[k] > 0.0)) f.fail(e->line, "lambda grid entries must be positive");
      if (k > 0 && !(g.values[k] > g.values[k - 1])) f.fail(e->line, "lambda grid must increase strictly");
    }
    c.grid = g;
    c.grid_line = e->line;
  }
  integer("constants", "trials", c.constant_trials);
  if (const auto* e = f.find("constants", "trials"); e && c.constant_trials < 100)
    f.fail(e->line, "constants trials must be at least 100");

  SolverConfig& s = c.solver;
  integer("solver", "max_outer_iters", s.max_outer_iters);
  num("solver", "initial_step", s.initial_step);
  num("solver", "shrink", s.shrink);
  num("solver", "sufficient_decrease", s.sufficient_decrease);
  integer("solver", "max_backtracks", s.max_backtracks);
  num("solver", "projection_tol", s.projection_tol);
  num("solver", "residual_stop", s.residual_stop);
  integer("solver", "multistart", s.multistart);
  num("solver", "start_bias", s.start_bias);
  num("solver", "start_amplitude", s.start_amplitude);
  integer("solver", "start_max_mode", s.start_max_mode);
  integer("solver", "start_halvings", s.start_halvings);
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(f.source() + ": [solver]: " + e.what());
  }

  integer("verify", "trials", c.verify.trials);
  integer("verify", "derivative_trials", c.verify.derivative_trials);
  if (const auto* e = f.find("verify", "trials"); e && c.verify.trials < 1) f.fail(e->line, "trials must be at least 1");
  if (const auto* e = f.find("output", "dir")) c.out_dir = e->value;
  c.verify.constant_trials = c.constant_trials;
  return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(IniFile::load(path)); }

inline Torus build_torus(const RunConfig& c) {
  const auto fail = [&](const std::string& what) -> Error {
    return Error(c.source + ":" + std::to_string(c.metric_line) + ": " + what);
  };
  const auto tok = detail::split_ws(c.metric);
  if (tok.empty() || tok[0] == "identity") {
    if (tok.size() > 1) throw fail("identity metric takes no arguments");
    return build_torus(c.dim, c.sizes, MetricSpec::identity(), c.lengths);
  }
  if (tok[0] == "constant") {
    const std::size_t nn = static_cast<std::size_t>(c.dim * c.dim);
    if (tok.size() != nn + 1) throw fail("constant metric needs " + std::to_string(nn) + " entries");
    std::vector<double> g;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      try {
        g.push_back(std::stod(tok[k]));
      } catch (const std::exception&) {
        throw fail("not a number: '" + tok[k] + "'");
      }
    }
    try {
      return build_torus(c.dim, c.sizes, MetricSpec::constant(g), c.lengths);
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  if (tok[0] == "file" && tok.size() == 2) {
    try {
      const Chart chart(c.dim, c.sizes, c.lengths);
      return build_torus(c.dim, c.sizes, read_metric_table(tok[1], chart), c.lengths);
    } catch (const Error& e) {
      throw fail(e.what());
    }
  }
  throw fail("metric must be 'identity', 'constant g..' or 'file PATH'");
}

inline ExponentField build_exponents(const RunConfig& c, const Torus& m) {
  ScalarField p = evaluate_field_spec(c.p, m.chart);
  ScalarField q = evaluate_field_spec(c.q, m.chart);
  try {
    return ExponentField(std::move(p), std::move(q));
  } catch (const Error& e) {
    throw Error(c.p.source + ":" + std::to_string(c.p.line) + ": " + e.what());
  }
}

inline WeightField build_weight(const RunConfig& c, const Torus& m) {
  try {
    return WeightField(evaluate_field_spec(c.mu, m.chart));
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind(c.mu.source, 0) == 0) throw;
    throw Error(c.mu.source + ":" + std::to_string(c.mu.line) + ": " + msg);
  }
}

inline ProblemInstance build_problem(const RunConfig& c, double lambda) {
  Torus m = build_torus(c);
  ExponentField ex = build_exponents(c, m);
  WeightField w = build_weight(c, m);
  ScalarField a = evaluate_field_spec(c.a, m.chart);
  try {
    return make_problem(std::move(m), std::move(ex), std::move(w), lambda,
                        Nonlinearity::power(c.beta, std::move(a), c.A_threshold));
  } catch (const Error& e) {
    throw Error(c.source + ": [problem]: " + e.what());
  }
}

}  // namespace nehari
