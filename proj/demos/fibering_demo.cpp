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
// Prints the fibering map of a single-mode field on the reference torus and
// the Nehari roots along its ray.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "nehari.hpp"

int main() {
  using namespace nehari;
  const Torus m = build_torus(1, {64});
  const ExponentField ex(m.constant(3.0), m.constant(2.0));
  const double lambda = 1.5;
  ProblemInstance P =
      make_problem(m, ex, WeightField(m.constant(1.0)), lambda, Nonlinearity::power(4.0, m.constant(1.0)));

  const ScalarField u =
      sample(m.chart, [](std::span<const double> x) { return 1.0 + 0.2 * std::sin(2.0 * std::numbers::pi * x[0]); });

  std::printf("%12s %14s %14s\n", "t", "phi_u(t)", "J(t u)");
  for (double t : log_grid(0.05, 2.0, 24))
    std::printf("%12.6f %14.6e %14.6e\n", t, RayProfile(P, u).phi(t), energy(P, scaled(u, t)).total);

  const Projection pr = project(P, u);
  if (pr.no_root) std::printf("%s\n", pr.diagnostics.c_str());
  for (const auto& r : pr.roots)
    std::printf("root t = %.12f  class %s  J = %.6e\n", r.t, to_string(r.klass), energy(P, scaled(u, r.t)).total);
  return 0;
}
