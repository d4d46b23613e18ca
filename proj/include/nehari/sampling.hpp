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

// Seeded random band-limited fields on a chart: finite Fourier sums with
// wave numbers |k_a| <= max_mode, used as trial fields and solver starts.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "nehari/manifold.hpp"
#include "nehari/random.hpp"

namespace nehari {

struct BandLimitedOptions {
  int max_mode = -1;          // <0: size/4 on the shortest axis
  bool random_cutoff = true;  // draw the cutoff uniformly in [1, max_mode]
  double mean = 0.0;
  double mean_sd = 0.0;       // mean += mean_sd * N(0,1)
  double amplitude = 1.0;
  double decay = 1.0;         // coefficient sd ~ amplitude / (1+|k|)^decay
};

inline ScalarField random_band_limited(const ChartPtr& chart, RandomStream& rng, const BandLimitedOptions& opt = {}) {
  const int n = chart->dim();
  std::size_t shortest = chart->size(0);
  for (int a = 1; a < n; ++a) shortest = std::min(shortest, chart->size(a));
  int kmax = opt.max_mode >= 0 ? opt.max_mode : static_cast<int>(shortest / 4);
  kmax = std::max(kmax, 1);
  const int cutoff = opt.random_cutoff ? rng.uniform_int(1, kmax) : kmax;

  struct Mode {
    std::array<int, kMaxDim> k;
    double a, b;
  };
  std::vector<Mode> modes;
  std::array<int, kMaxDim> k{};
  const int span = 2 * cutoff + 1;
  int total = 1;
  for (int a = 0; a < n; ++a) total *= span;
  for (int code = 0; code < total; ++code) {
    int c = code;
    for (int a = 0; a < n; ++a) {
      k[a] = c % span - cutoff;
      c /= span;
    }
    // keep one of each +-k pair
    int first = 0;
    for (int a = 0; a < n; ++a)
      if (k[a] != 0) {
        first = k[a];
        break;
      }
    if (first <= 0) continue;
    double norm2 = 0.0;
    for (int a = 0; a < n; ++a) norm2 += static_cast<double>(k[a]) * k[a];
    const double sd = opt.amplitude / std::pow(1.0 + std::sqrt(norm2), opt.decay);
    const double ca = sd * rng.normal();
    const double cb = sd * rng.normal();
    modes.push_back({k, ca, cb});
  }
  const double mean = opt.mean + (opt.mean_sd != 0.0 ? opt.mean_sd * rng.normal() : 0.0);

  ScalarField u(chart, mean);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double s = mean;
    for (const Mode& m : modes) {
      double phase = 0.0;
      for (int a = 0; a < n; ++a)
        phase += 2.0 * std::numbers::pi * m.k[a] * chart->coordinate(i, a) / chart->length(a);
      s += m.a * std::cos(phase) + m.b * std::sin(phase);
    }
    u[i] = s;
  }
  return u;
}

/// Subtracts the dv_g-weighted mean.
inline ScalarField zero_mean(const ScalarField& u, const Torus& m) {
  const double avg = integrate(u, m) / volume(m);
  ScalarField out = u;
  for (double& x : out.values) x -= avg;
  return out;
}

}  // namespace nehari
