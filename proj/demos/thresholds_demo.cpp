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
// Estimates the embedding constants for a variable-exponent instance and
// prints the resulting lambda thresholds.

#include <cstdio>

#include "nehari.hpp"

int main(int argc, char** argv) {
  using namespace nehari;
  const int trials = argc > 1 ? std::atoi(argv[1]) : 500;
  const Torus m = build_torus(1, {64});
  FieldSpec p{"fourier 3.0 cos:0:1:0.2", "demo", 0}, q{"fourier 2.0 sin:0:1:0.05", "demo", 0};
  FieldSpec mu{"fourier 5 sin:0:1:1", "demo", 0};
  const ExponentField ex(evaluate_field_spec(p, m.chart), evaluate_field_spec(q, m.chart));
  const WeightField w(evaluate_field_spec(mu, m.chart));

  const ConstantsEstimate c = estimate_constants(ex, w, m, trials, 42);
  const Thresholds th = thresholds(ex.bounds(), w.mu0(), c);
  std::printf("trials %d, seed %llu\n", c.trials, static_cast<unsigned long long>(c.seed));
  std::printf("c_poincare %.6f  D_embed %.6f  c1_embed %.6f  r_q %.6f\n", c.c_poincare, c.D_embed, c.c1_embed, c.r_q);
  std::printf("lambda**   %.6f%s\n", th.lambda_star_star, th.lambda_star_star_degenerate ? "  (degenerate)" : "");
  std::printf("lambda*    %.6f%s\n", th.lambda_star, th.lambda_star_clamped ? "  (clamped)" : "");
  std::printf("lambda_bar %.6f\n", th.lambda_bar);
  return 0;
}
