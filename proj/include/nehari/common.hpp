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

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nehari {

/// Base class for contract violations raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::size_t kPairwiseBlock = 8;

/// Pairwise (cascade) summation with a fixed split point at n/2, so the
/// reduction tree depends only on the length of the input.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= kPairwiseBlock) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Evaluates term(i) for i in [0, n) into a scratch buffer and reduces it
/// pairwise.
template <class Term>
double reduce_nodes(std::size_t n, Term&& term) {
  std::vector<double> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = term(i);
  return pairwise_sum(buf);
}

}  // namespace detail
}  // namespace nehari
