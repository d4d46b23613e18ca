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
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "nehari/manifold.hpp"
#include "nehari/random.hpp"
#include "nehari/sampling.hpp"

namespace nehari {
namespace {

constexpr double kPi = std::numbers::pi;

Torus unit_line(std::size_t n) { return build_torus(1, {n}); }

/// Per-node SPD table built as L L^T + 0.5 I from a seeded stream.
std::vector<double> random_spd_table(const Chart& c, std::uint64_t seed) {
  RandomStream rng(seed);
  const int n = c.dim();
  std::vector<double> t;
  for (std::size_t i = 0; i < c.node_count(); ++i) {
    Eigen::MatrixXd l(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) l(a, b) = rng.uniform(-1.0, 1.0);
    const Eigen::MatrixXd g = l * l.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) t.push_back(g(a, b));
  }
  return t;
}

TEST(Chart, IndexingAndWrap) {
  const std::vector<std::size_t> sizes{4, 5, 6};
  const Chart c(3, sizes, {});
  EXPECT_EQ(c.node_count(), 120u);
  const std::size_t node = 2 * 30 + 3 * 6 + 5;
  EXPECT_EQ(c.index(node, 0), 2u);
  EXPECT_EQ(c.index(node, 1), 3u);
  EXPECT_EQ(c.index(node, 2), 5u);
  EXPECT_EQ(c.index(c.neighbor(node, 2, 1), 2), 0u);
  EXPECT_EQ(c.index(c.neighbor(node, 1, 1), 1), 4u);
  EXPECT_EQ(c.index(c.neighbor(node, 1, 2), 1), 0u);
  EXPECT_EQ(c.neighbor(c.neighbor(node, 0, -3), 0, 3), node);
  EXPECT_DOUBLE_EQ(c.spacing(2), 1.0 / 6.0);
}

TEST(Chart, PeriodicDistance) {
  const Torus m = unit_line(8);
  EXPECT_DOUBLE_EQ(m.chart->distance(0, 7), 0.125);
  EXPECT_DOUBLE_EQ(m.chart->distance(1, 5), 0.5);
}

TEST(Chart, RejectsBadShapes) {
  EXPECT_THROW(build_torus(4, {8, 8, 8, 8}), Error);
  EXPECT_THROW(build_torus(2, {8}), Error);
  EXPECT_THROW(build_torus(1, {3}), Error);
}

TEST(BuildTorus, IdentityMetricHasUnitDensity) {
  const Torus m = unit_line(64);
  for (std::size_t i = 0; i < m.node_count(); ++i) EXPECT_EQ(m.metric->sqrt_det(i), 1.0);
  EXPECT_TRUE(m.metric->is_identity());
}

TEST(BuildTorus, ScalarMetricFour) {
  const Torus m = build_torus(1, {64}, MetricSpec::constant({4.0}));
  for (std::size_t i = 0; i < m.node_count(); ++i) EXPECT_DOUBLE_EQ(m.metric->sqrt_det(i), 2.0);
}

TEST(BuildTorus, PerNodeTableMatchesEigenInverse) {
  const std::vector<std::size_t> sizes{32, 32};
  const Chart c(2, sizes, {});
  const auto table = random_spd_table(c, 7);
  const Torus m = build_torus(2, sizes, MetricSpec::per_node(table));
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    Eigen::Matrix2d g;
    g << table[3 * i], table[3 * i + 1], table[3 * i + 1], table[3 * i + 2];
    const Eigen::Matrix2d inv = g.inverse();
    const auto& ours = m.metric->inv(i);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) EXPECT_NEAR(ours[a * 2 + b], inv(a, b), 1e-12 * (1.0 + std::abs(inv(a, b))));
    EXPECT_NEAR(m.metric->sqrt_det(i), std::sqrt(g.determinant()), 1e-13);
  }
}

TEST(BuildTorus, ThreeDimensionalInverseIsIdentityProduct) {
  const std::vector<std::size_t> sizes{4, 4, 4};
  const Chart c(3, sizes, {});
  const auto table = random_spd_table(c, 11);
  const Torus m = build_torus(3, sizes, MetricSpec::per_node(table));
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    Eigen::Matrix3d g, inv;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        g(a, b) = m.metric->g(i)[a * 3 + b];
        inv(a, b) = m.metric->inv(i)[a * 3 + b];
      }
    EXPECT_LT((g * inv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(m.metric->sqrt_det(i), std::sqrt(g.determinant()), 1e-12);
  }
}

TEST(BuildTorus, NonSpdNodeNamed) {
  const std::vector<std::size_t> sizes{4, 4};
  const Chart c(2, sizes, {});
  std::vector<double> table;
  for (std::size_t i = 0; i < c.node_count(); ++i) {
    const bool bad = i == 5;
    table.insert(table.end(), {1.0, bad ? 2.0 : 0.0, 1.0});
  }
  try {
    build_torus(2, sizes, MetricSpec::per_node(table));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("node 5"), std::string::npos) << e.what();
  }
}

TEST(Gradient, ConstantIsExactlyZero) {
  const Torus m = build_torus(2, {8, 8});
  const VectorField g = gradient(m.constant(3.7));
  for (double x : g.values) EXPECT_EQ(x, 0.0);
}

TEST(Gradient, SineMatchesAnalyticWithinTruncationBound) {
  const Torus m = unit_line(64);
  const ScalarField u = sample(m.chart, [](std::span<const double> x) { return std::sin(2 * kPi * x[0]); });
  const VectorField g = gradient(u);
  const double h = m.chart->spacing(0);
  const double bound = std::pow(2 * kPi, 3) * h * h / 6.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = m.chart->coordinate(i, 0);
    worst = std::max(worst, std::abs(g.at(i, 0) - 2 * kPi * std::cos(2 * kPi * x)));
    // closed form of the central difference of a sine
    EXPECT_NEAR(g.at(i, 0), std::sin(2 * kPi * h) / h * std::cos(2 * kPi * x), 1e-12);
  }
  EXPECT_LE(worst, bound);
}

TEST(Gradient, ProductOfSinesIsSecondOrder) {
  double prev = 0.0;
  for (std::size_t n : {16u, 32u, 64u}) {
    const Torus m = build_torus(2, {n, n});
    const ScalarField u = sample(m.chart, [](std::span<const double> x) {
      return std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
    });
    const VectorField g = gradient(u);
    double err = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = m.chart->coordinate(i, 0), y = m.chart->coordinate(i, 1);
      err = std::max(err, std::abs(g.at(i, 0) - 2 * kPi * std::cos(2 * kPi * x) * std::sin(2 * kPi * y)));
      err = std::max(err, std::abs(g.at(i, 1) - 2 * kPi * std::sin(2 * kPi * x) * std::cos(2 * kPi * y)));
    }
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(Gradient, TranslationEquivariant) {
  const Torus m = build_torus(2, {8, 6});
  RandomStream rng(3);
  ScalarField u(m.chart);
  for (double& x : u.values) x = rng.normal();
  ScalarField shifted(m.chart);
  for (std::size_t i = 0; i < u.size(); ++i) shifted[m.chart->neighbor(m.chart->neighbor(i, 0, 3), 1, -2)] = u[i];
  const VectorField g = gradient(u), gs = gradient(shifted);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const std::size_t j = m.chart->neighbor(m.chart->neighbor(i, 0, 3), 1, -2);
    for (int a = 0; a < 2; ++a) EXPECT_EQ(gs.at(j, a), g.at(i, a));
  }
}

TEST(GradNorm, EuclideanAndScalarMetric) {
  const Torus m2 = build_torus(2, {4, 4});
  VectorField v{m2.chart, std::vector<double>(32)};
  v.at(0, 0) = 3.0;
  v.at(0, 1) = 4.0;
  EXPECT_DOUBLE_EQ(grad_norm_g(v, *m2.metric)[0], 5.0);

  const Torus m1 = build_torus(1, {4}, MetricSpec::constant({4.0}));
  VectorField w{m1.chart, std::vector<double>(4, 2.0)};
  EXPECT_DOUBLE_EQ(grad_norm_g(w, *m1.metric)[0], 1.0);
}

TEST(GradNorm, MatchesEigenQuadraticForm) {
  const std::vector<std::size_t> sizes{8, 8};
  const Chart c(2, sizes, {});
  const auto table = random_spd_table(c, 19);
  const Torus m = build_torus(2, sizes, MetricSpec::per_node(table));
  RandomStream rng(23);
  VectorField v{m.chart, std::vector<double>(2 * m.node_count())};
  for (double& x : v.values) x = rng.normal();
  const ScalarField r = grad_norm_g(v, *m.metric);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    Eigen::Matrix2d g;
    g << table[3 * i], table[3 * i + 1], table[3 * i + 1], table[3 * i + 2];
    const Eigen::Vector2d vi(v.at(i, 0), v.at(i, 1));
    EXPECT_NEAR(r[i], std::sqrt(vi.dot(g.inverse() * vi)), 1e-12);
    EXPECT_GE(r[i], 0.0);
  }
}

TEST(Integrate, VolumesAndSymmetry) {
  const Torus m = unit_line(64);
  EXPECT_DOUBLE_EQ(integrate(m.constant(1.0), m), 1.0);
  const ScalarField s = sample(m.chart, [](std::span<const double> x) { return std::sin(2 * kPi * x[0]); });
  EXPECT_NEAR(integrate(s, m), 0.0, 1e-14);
  const Torus m4 = build_torus(1, {64}, MetricSpec::constant({4.0}));
  EXPECT_DOUBLE_EQ(integrate(m4.constant(1.0), m4), 2.0);
}

TEST(Integrate, ConstantMetricVolumeIsAnalytic) {
  const std::vector<std::size_t> sizes{16, 12};
  const std::vector<double> lengths{2.0, 3.0};
  const Torus m = build_torus(2, sizes, MetricSpec::constant({1.2, 0.3, 0.3, 0.9}), lengths);
  const double expected = 6.0 * std::sqrt(1.2 * 0.9 - 0.09);
  EXPECT_NEAR(volume(m), expected, 1e-13 * expected);
}

TEST(Integrate, Linear) {
  const Torus m = build_torus(2, {16, 16}, MetricSpec::constant({2.0, 0.5, 0.5, 1.0}));
  RandomStream rng(5);
  const ScalarField u = random_band_limited(m.chart, rng);
  const ScalarField v = random_band_limited(m.chart, rng);
  const double lhs = integrate(combine(2.5, u, -1.5, v), m);
  const double rhs = 2.5 * integrate(u, m) - 1.5 * integrate(v, m);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
}

TEST(PairwiseSum, TreeDependsOnlyOnLength) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = 1.0 / static_cast<double>(i + 1);
  const double a = detail::pairwise_sum(xs);
  const double b = detail::pairwise_sum(xs);
  EXPECT_EQ(a, b);
  long double ref = 0.0L;
  for (double x : xs) ref += x;
  EXPECT_NEAR(a, static_cast<double>(ref), 1e-13);
}

TEST(LogHolder, ConstantAndSmooth) {
  const Torus m = unit_line(64);
  const auto c = log_holder_check(m.constant(2.0));
  EXPECT_TRUE(c.pass);
  EXPECT_EQ(c.constant, 0.0);

  const ScalarField s = sample(m.chart, [](std::span<const double> x) { return 2.0 + 0.1 * std::sin(2 * kPi * x[0]); });
  const auto r = log_holder_check(s);
  double oracle = 0.0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (a == b) continue;
      double d = std::abs(m.chart->coordinate(a, 0) - m.chart->coordinate(b, 0));
      d = std::min(d, 1.0 - d);
      oracle = std::max(oracle, std::abs(s[a] - s[b]) * std::log(std::numbers::e + 1.0 / d));
    }
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.constant, oracle, 1e-12);
}

TEST(LogHolder, StepConstantGrowsUnderRefinement) {
  double prev = 0.0;
  for (std::size_t n : {64u, 512u, 4096u}) {
    const Torus m = unit_line(n);
    const ScalarField s = sample(m.chart, [](std::span<const double> x) { return x[0] < 0.5 ? 2.0 : 2.5; });
    const auto r = log_holder_check(s, 10.0, 1024);
    EXPECT_GT(r.constant, prev);
    prev = r.constant;
  }
}

TEST(Random, DeterministicAndSplitStable) {
  RandomStream a(42, 1), b(42, 1), c(42, 2);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(RandomStream(42, 1).next_u64(), c.next_u64());
  const RandomStream root(9);
  RandomStream s3 = root.split(3);
  RandomStream unused = root.split(2);
  (void)unused.next_u64();
  EXPECT_EQ(s3.next_u64(), root.split(3).next_u64());
}

TEST(Random, NormalMoments) {
  RandomStream r(1);
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

}  // namespace
}  // namespace nehari
