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

// Discrete compact Riemannian charts: periodic uniform grids (flat tori
// T^n, n <= 3) carrying a per-node metric tensor g_ij. Integrals use the
// rectangle rule against dv_g = sqrt(det g) dx; derivatives are
// second-order central differences with periodic wrap.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nehari/common.hpp"

namespace nehari {

inline constexpr int kMaxDim = 3;

/// Periodic uniform grid on [0, L_0) x ... x [0, L_{n-1}).
class Chart {
public:
  Chart(int dim, std::span<const std::size_t> sizes, std::span<const double> lengths) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw Error("chart dimension must be 1, 2 or 3");
    if (sizes.size() != static_cast<std::size_t>(dim))
      throw Error("chart needs one size per axis");
    if (!lengths.empty() && lengths.size() != static_cast<std::size_t>(dim))
      throw Error("chart needs one length per axis");
    node_count_ = 1;
    for (int a = 0; a < dim; ++a) {
      if (sizes[a] < 4) throw Error("chart needs at least 4 nodes per axis");
      const double len = lengths.empty() ? 1.0 : lengths[a];
      if (!(len > 0.0) || !std::isfinite(len)) throw Error("chart lengths must be positive");
      sizes_[a] = sizes[a];
      lengths_[a] = len;
      spacings_[a] = len / static_cast<double>(sizes[a]);
      node_count_ *= sizes[a];
    }
    std::size_t stride = 1;
    for (int a = dim - 1; a >= 0; --a) {
      strides_[a] = stride;
      stride *= sizes_[a];
    }
    cell_volume_ = 1.0;
    for (int a = 0; a < dim; ++a) cell_volume_ *= spacings_[a];
  }

  int dim() const { return dim_; }
  std::size_t size(int axis) const { return sizes_[axis]; }
  double spacing(int axis) const { return spacings_[axis]; }
  double length(int axis) const { return lengths_[axis]; }
  std::size_t node_count() const { return node_count_; }
  /// prod_a h_a, the coordinate volume of one grid cell.
  double cell_volume() const { return cell_volume_; }

  /// Grid index along `axis` of a row-major node number (axis 0 slowest).
  std::size_t index(std::size_t node, int axis) const { return (node / strides_[axis]) % sizes_[axis]; }

  double coordinate(std::size_t node, int axis) const {
    return static_cast<double>(index(node, axis)) * spacings_[axis];
  }

  /// Node reached by moving `step` cells along `axis`, wrapping periodically.
  std::size_t neighbor(std::size_t node, int axis, long step) const {
    const auto n = static_cast<long>(sizes_[axis]);
    const auto i = static_cast<long>(index(node, axis));
    long j = (i + step) % n;
    if (j < 0) j += n;
    return node + static_cast<std::size_t>(j - i) * strides_[axis];
  }

  /// Periodic Euclidean chart distance; stands in for the geodesic distance.
  double distance(std::size_t a, std::size_t b) const {
    double d2 = 0.0;
    for (int ax = 0; ax < dim_; ++ax) {
      double d = std::abs(coordinate(a, ax) - coordinate(b, ax));
      d = std::min(d, lengths_[ax] - d);
      d2 += d * d;
    }
    return std::sqrt(d2);
  }

  bool same_shape(const Chart& o) const {
    if (dim_ != o.dim_) return false;
    for (int a = 0; a < dim_; ++a)
      if (sizes_[a] != o.sizes_[a] || spacings_[a] != o.spacings_[a]) return false;
    return true;
  }

private:
  int dim_;
  std::array<std::size_t, kMaxDim> sizes_{};
  std::array<std::size_t, kMaxDim> strides_{};
  std::array<double, kMaxDim> spacings_{};
  std::array<double, kMaxDim> lengths_{};
  std::size_t node_count_ = 0;
  double cell_volume_ = 1.0;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// One real value per chart node.
struct ScalarField {
  ChartPtr chart;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(ChartPtr c, double fill = 0.0) : chart(std::move(c)), values(chart->node_count(), fill) {}
  ScalarField(ChartPtr c, std::vector<double> v) : chart(std::move(c)), values(std::move(v)) {
    if (values.size() != chart->node_count()) throw Error("field size does not match chart");
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }

  double min() const { return *std::min_element(values.begin(), values.end()); }
  double max() const { return *std::max_element(values.begin(), values.end()); }
  bool all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
  }
};

/// Samples f(x) at every node; x holds the chart coordinates.
inline ScalarField sample(const ChartPtr& chart, const std::function<double(std::span<const double>)>& f) {
  ScalarField out(chart);
  std::array<double, kMaxDim> x{};
  for (std::size_t i = 0; i < chart->node_count(); ++i) {
    for (int a = 0; a < chart->dim(); ++a) x[a] = chart->coordinate(i, a);
    out[i] = f(std::span<const double>(x.data(), static_cast<std::size_t>(chart->dim())));
  }
  return out;
}

inline ScalarField scaled(const ScalarField& u, double s) {
  ScalarField out = u;
  for (double& x : out.values) x *= s;
  return out;
}

/// a*u + b*v
inline ScalarField combine(double a, const ScalarField& u, double b, const ScalarField& v) {
  if (!u.chart->same_shape(*v.chart)) throw Error("field shapes differ");
  ScalarField out(u.chart);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = a * u[i] + b * v[i];
  return out;
}

/// Chart-coordinate gradient: n components per node, node-major.
struct VectorField {
  ChartPtr chart;
  std::vector<double> values;

  int dim() const { return chart->dim(); }
  double at(std::size_t node, int axis) const { return values[node * static_cast<std::size_t>(dim()) + axis]; }
  double& at(std::size_t node, int axis) { return values[node * static_cast<std::size_t>(dim()) + axis]; }
};

/// How the metric is supplied to build_torus.
struct MetricSpec {
  enum class Kind { identity, constant, table };
  Kind kind = Kind::identity;
  std::vector<double> matrix;  // n*n, row-major (constant)
  std::vector<double> table;   // n(n+1)/2 per node, upper triangle row-major

  static MetricSpec identity() { return {}; }
  static MetricSpec constant(std::vector<double> m) { return {Kind::constant, std::move(m), {}}; }
  static MetricSpec per_node(std::vector<double> t) { return {Kind::table, {}, std::move(t)}; }
};

inline std::size_t upper_triangle_count(int n) { return static_cast<std::size_t>(n * (n + 1) / 2); }

/// Per-node SPD metric with cached sqrt(det g) and g^{-1}.
class MetricField {
public:
  using Matrix = std::array<double, kMaxDim * kMaxDim>;

  MetricField(ChartPtr chart, const MetricSpec& spec) : chart_(std::move(chart)) {
    const int n = chart_->dim();
    const std::size_t nodes = chart_->node_count();
    identity_ = spec.kind == MetricSpec::Kind::identity;
    g_.resize(nodes);
    inv_.resize(nodes);
    sqrt_det_.resize(nodes);
    const std::size_t tri = upper_triangle_count(n);
    if (spec.kind == MetricSpec::Kind::constant && spec.matrix.size() != static_cast<std::size_t>(n * n))
      throw Error("constant metric needs n*n entries");
    if (spec.kind == MetricSpec::Kind::table && spec.table.size() != tri * nodes)
      throw Error("metric table needs n(n+1)/2 entries per node");
    for (std::size_t node = 0; node < nodes; ++node) {
      Matrix m{};
      switch (spec.kind) {
        case MetricSpec::Kind::identity:
          for (int a = 0; a < n; ++a) m[a * n + a] = 1.0;
          break;
        case MetricSpec::Kind::constant:
          for (int k = 0; k < n * n; ++k) m[k] = spec.matrix[k];
          break;
        case MetricSpec::Kind::table: {
          std::size_t k = node * tri;
          for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
              m[a * n + b] = spec.table[k];
              m[b * n + a] = spec.table[k];
              ++k;
            }
          break;
        }
      }
      set_node(node, m);
    }
  }

  const ChartPtr& chart() const { return chart_; }
  bool is_identity() const { return identity_; }
  double sqrt_det(std::size_t node) const { return sqrt_det_[node]; }
  const Matrix& g(std::size_t node) const { return g_[node]; }
  const Matrix& inv(std::size_t node) const { return inv_[node]; }
  /// Quadrature weight sqrt(det g) * cell volume.
  double node_weight(std::size_t node) const { return sqrt_det_[node] * chart_->cell_volume(); }

private:
  void set_node(std::size_t node, const Matrix& m) {
    const int n = chart_->dim();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < a; ++b)
        if (std::abs(m[a * n + b] - m[b * n + a]) > 1e-14 * (std::abs(m[a * n + b]) + std::abs(m[b * n + a])))
          throw Error("metric at node " + std::to_string(node) + " is not symmetric");
    // Cholesky pivots; all positive iff SPD
    std::array<double, kMaxDim * kMaxDim> l{};
    for (int j = 0; j < n; ++j) {
      double d = m[j * n + j];
      for (int k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
      if (!(d > 0.0) || !std::isfinite(d))
        throw Error("metric at node " + std::to_string(node) + " is not symmetric positive-definite");
      l[j * n + j] = std::sqrt(d);
      for (int i = j + 1; i < n; ++i) {
        double s = m[i * n + j];
        for (int k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
        l[i * n + j] = s / l[j * n + j];
      }
    }
    double det = 1.0;
    for (int j = 0; j < n; ++j) det *= l[j * n + j] * l[j * n + j];
    g_[node] = m;
    sqrt_det_[node] = std::sqrt(det);
    inv_[node] = inverse(m, n, det);
  }

  static Matrix inverse(const Matrix& m, int n, double det) {
    Matrix r{};
    if (n == 1) {
      r[0] = 1.0 / m[0];
    } else if (n == 2) {
      r[0] = m[3] / det;
      r[1] = -m[1] / det;
      r[2] = -m[2] / det;
      r[3] = m[0] / det;
    } else {
      auto at = [&](int i, int j) { return m[i * 3 + j]; };
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
          r[i * 3 + j] = (at(i1, j1) * at(i2, j2) - at(i1, j2) * at(i2, j1)) / det;
        }
    }
    return r;
  }

  ChartPtr chart_;
  bool identity_ = false;
  std::vector<Matrix> g_;
  std::vector<Matrix> inv_;
  std::vector<double> sqrt_det_;
};

/// A chart together with its metric; the discrete compact manifold.
struct Torus {
  ChartPtr chart;
  std::shared_ptr<const MetricField> metric;

  std::size_t node_count() const { return chart->node_count(); }
  double node_weight(std::size_t i) const { return metric->node_weight(i); }
  ScalarField constant(double c) const { return ScalarField(chart, c); }
};

inline Torus build_torus(int dim, std::span<const std::size_t> sizes, const MetricSpec& spec = MetricSpec::identity(),
                         std::span<const double> lengths = {}) {
  auto chart = std::make_shared<const Chart>(dim, sizes, lengths);
  auto metric = std::make_shared<const MetricField>(chart, spec);
  return {std::move(chart), std::move(metric)};
}

inline Torus build_torus(int dim, std::initializer_list<std::size_t> sizes,
                         const MetricSpec& spec = MetricSpec::identity()) {
  std::vector<std::size_t> s(sizes);
  return build_torus(dim, std::span<const std::size_t>(s), spec);
}

inline void require_same_chart(const ScalarField& u, const Torus& m) {
  if (!u.chart || !u.chart->same_shape(*m.chart)) throw Error("field does not live on this chart");
}

/// Central differences with periodic wrap.
inline VectorField gradient(const ScalarField& u) {
  const Chart& c = *u.chart;
  const int n = c.dim();
  VectorField out{u.chart, std::vector<double>(u.size() * static_cast<std::size_t>(n))};
  for (std::size_t i = 0; i < u.size(); ++i)
    for (int a = 0; a < n; ++a)
      out.at(i, a) = (u[c.neighbor(i, a, 1)] - u[c.neighbor(i, a, -1)]) / (2.0 * c.spacing(a));
  return out;
}

/// g^{ij} v_i v_j at one node, v given by its n components.
inline double metric_square(const MetricField& g, std::size_t node, const double* v) {
  const int n = g.chart()->dim();
  if (g.is_identity()) {
    double s = 0.0;
    for (int a = 0; a < n; ++a) s += v[a] * v[a];
    return s;
  }
  const auto& inv = g.inv(node);
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += inv[a * n + b] * v[a] * v[b];
  return s;
}

/// |v|_g = sqrt(g^{ij} v_i v_j) per node.
inline ScalarField grad_norm_g(const VectorField& v, const MetricField& g) {
  if (!v.chart->same_shape(*g.chart())) throw Error("vector field does not live on the metric's chart");
  ScalarField out(v.chart);
  const auto n = static_cast<std::size_t>(v.dim());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::sqrt(std::max(0.0, metric_square(g, i, v.values.data() + i * n)));
  return out;
}

inline ScalarField grad_norm_g(const ScalarField& u, const Torus& m) { return grad_norm_g(gradient(u), *m.metric); }

/// Rectangle rule: sum_i w_i sqrt(det g_i) prod_a h_a, reduced pairwise.
inline double integrate(const ScalarField& w, const MetricField& g) {
  if (!w.chart->same_shape(*g.chart())) throw Error("field does not live on the metric's chart");
  return detail::reduce_nodes(w.size(), [&](std::size_t i) { return w[i] * g.node_weight(i); });
}

inline double integrate(const ScalarField& w, const Torus& m) { return integrate(w, *m.metric); }

inline double volume(const Torus& m) {
  return detail::reduce_nodes(m.node_count(), [&](std::size_t i) { return m.node_weight(i); });
}

struct LogHolderResult {
  bool pass = true;
  double constant = 0.0;  // least c over the scanned pairs
  std::size_t worst_a = 0, worst_b = 0;
  std::size_t pairs_scanned = 0;
  double limit = 0.0;
  std::string distance = "periodic chart distance";
};

/// Estimates the least c with |s(x)-s(y)| <= c / log(e + 1/d(x,y)) over node
/// pairs. Above max_nodes nodes only a strided subset of first members is
/// scanned (all second members are always visited).
inline LogHolderResult log_holder_check(const ScalarField& s, double limit = 10.0, std::size_t max_nodes = 10000) {
  const Chart& c = *s.chart;
  const std::size_t n = s.size();
  if (n < 2) throw Error("log-Hoelder check needs at least two nodes");
  const std::size_t stride = n > max_nodes ? (n + max_nodes - 1) / max_nodes : 1;
  LogHolderResult r;
  r.limit = limit;
  for (std::size_t a = 0; a < n; a += stride)
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = c.distance(a, b);
      const double cab = std::abs(s[a] - s[b]) * std::log(std::numbers::e + 1.0 / d);
      ++r.pairs_scanned;
      if (cab > r.constant) {
        r.constant = cab;
        r.worst_a = a;
        r.worst_b = b;
      }
    }
  r.pass = std::isfinite(r.constant) && r.constant <= limit;
  return r;
}

}  // namespace nehari
