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

// Plain-text grid field files:
//
//   nehari-field v1 [metric]
//   dim <n> <size_0> ... <size_{n-1}>
//   <value>            one node per line, row-major, 17 significant digits
//
// Metric tables carry n(n+1)/2 upper-triangle entries per node line.

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nehari/manifold.hpp"

namespace nehari {

struct FieldFile {
  int dim = 0;
  std::vector<std::size_t> sizes;
  bool metric = false;
  std::vector<double> values;  // node-major; metric tables hold n(n+1)/2 per node
};

namespace detail {

inline std::string format17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] inline void field_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(source + ":" + std::to_string(line) + ": " + what);
}

inline double parse_double(const std::string& tok, const std::string& source, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    field_error(source, line, "not a number: '" + tok + "'");
  }
  if (used != tok.size()) field_error(source, line, "not a number: '" + tok + "'");
  return v;
}

}  // namespace detail

inline void write_field_file(std::ostream& os, const FieldFile& f) {
  os << "nehari-field v1" << (f.metric ? " metric" : "") << "\n";
  os << "dim " << f.dim;
  for (auto s : f.sizes) os << " " << s;
  os << "\n";
  const std::size_t per = f.metric ? upper_triangle_count(f.dim) : 1;
  for (std::size_t i = 0; i < f.values.size(); i += per) {
    for (std::size_t k = 0; k < per; ++k) os << (k ? " " : "") << detail::format17(f.values[i + k]);
    os << "\n";
  }
}

inline FieldFile read_field_file(std::istream& is, const std::string& source = "<field>") {
  FieldFile f;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next()) detail::field_error(source, lineno, "empty field file");
  {
    std::istringstream ss(line);
    std::string magic, version, tag;
    ss >> magic >> version;
    if (magic != "nehari-field" || version != "v1") detail::field_error(source, lineno, "expected 'nehari-field v1'");
    if (ss >> tag) {
      if (tag != "metric") detail::field_error(source, lineno, "unknown header tag '" + tag + "'");
      f.metric = true;
    }
  }
  if (!next()) detail::field_error(source, lineno, "missing 'dim' line");
  {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key != "dim" || !(ss >> f.dim) || f.dim < 1 || f.dim > kMaxDim)
      detail::field_error(source, lineno, "expected 'dim n sizes...' with 1 <= n <= 3");
    for (int a = 0; a < f.dim; ++a) {
      long s = 0;
      if (!(ss >> s) || s < 1) detail::field_error(source, lineno, "missing or invalid size for axis " + std::to_string(a));
      f.sizes.push_back(static_cast<std::size_t>(s));
    }
    std::string extra;
    if (ss >> extra) detail::field_error(source, lineno, "trailing token '" + extra + "'");
  }
  std::size_t nodes = 1;
  for (auto s : f.sizes) nodes *= s;
  const std::size_t per = f.metric ? upper_triangle_count(f.dim) : 1;
  f.values.reserve(nodes * per);
  while (next()) {
    std::istringstream ss(line);
    std::string tok;
    std::size_t count = 0;
    while (ss >> tok) {
      f.values.push_back(detail::parse_double(tok, source, lineno));
      ++count;
    }
    if (count != per)
      detail::field_error(source, lineno, "expected " + std::to_string(per) + " value(s), got " + std::to_string(count));
    if (f.values.size() > nodes * per) detail::field_error(source, lineno, "more node lines than the grid holds");
  }
  if (f.values.size() != nodes * per)
    detail::field_error(source, lineno, "expected " + std::to_string(nodes) + " node lines, got " +
                                            std::to_string(f.values.size() / per));
  return f;
}

inline void write_field(const std::string& path, const ScalarField& u) {
  FieldFile f;
  f.dim = u.chart->dim();
  for (int a = 0; a < f.dim; ++a) f.sizes.push_back(u.chart->size(a));
  f.values = u.values;
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_field_file(os, f);
  if (!os) throw Error("failed writing '" + path + "'");
}

inline FieldFile read_field_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open field file '" + path + "'");
  return read_field_file(is, path);
}

/// Reads a scalar field and attaches it to `chart`, whose shape must match.
inline ScalarField read_field(const std::string& path, const ChartPtr& chart) {
  const FieldFile f = read_field_file(path);
  if (f.metric) throw Error(path + ": expected a scalar field, found a metric table");
  if (f.dim != chart->dim()) throw Error(path + ": dimension " + std::to_string(f.dim) + " does not match the chart");
  for (int a = 0; a < f.dim; ++a)
    if (f.sizes[static_cast<std::size_t>(a)] != chart->size(a))
      throw Error(path + ": size of axis " + std::to_string(a) + " does not match the chart");
  ScalarField u(chart);
  u.values = f.values;
  return u;
}

inline MetricSpec read_metric_table(const std::string& path, const Chart& chart) {
  const FieldFile f = read_field_file(path);
  if (!f.metric) throw Error(path + ": expected a metric table ('nehari-field v1 metric')");
  if (f.dim != chart.dim()) throw Error(path + ": dimension does not match the chart");
  for (int a = 0; a < f.dim; ++a)
    if (f.sizes[static_cast<std::size_t>(a)] != chart.size(a))
      throw Error(path + ": size of axis " + std::to_string(a) + " does not match the chart");
  return MetricSpec::per_node(f.values);
}

}  // namespace nehari
