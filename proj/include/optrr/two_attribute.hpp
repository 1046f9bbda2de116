// Copyright 2026 The optrr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>

#include "optrr/real.hpp"

namespace optrr {

enum class TwoAttrCase { I, II, III, IV };

inline char const* case_name(TwoAttrCase c) {
  switch (c) {
    case TwoAttrCase::I: return "I";
    case TwoAttrCase::II: return "II";
    case TwoAttrCase::III: return "III";
    case TwoAttrCase::IV: return "IV";
  }
  throw std::logic_error("unreachable");
}

// Exact optimizer output for two-attribute m x n data: the ratios
// (x_{2,0}, x_{2,1}, x_{2,2}) minimizing x_{2,0} subject to the two
// per-attribute level equalities and x_{2,0} >= x_{2,1}, x_{2,2} >= 1.
struct TwoAttrSolution {
  Real x20, x21, x22;
  TwoAttrCase case_id;
};

// Four-case closed form. Case selection:
//   (I)/(II):  e^{e1+e2} >= (m-1)(n-1), split on n(e^{e1}-1) >= m(e^{e2}-1);
//   (III)/(IV): otherwise, split on the sign of
//               (n-m)e^{e1+e2} - m(n-1)e^{e1} + (m-1)n e^{e2}.
// In (III) the minimizer has x21 tied to x20; in (IV) x22 is tied.
inline TwoAttrSolution optimal_two(int m, int n, double eps1, double eps2) {
  if (m < 2 || n < 2) throw std::invalid_argument("optimal_two: domain sizes must be >= 2");
  if (!(eps1 > 0) || !(eps2 > 0))
    throw std::invalid_argument("optimal_two: privacy levels must be positive");

  const Real e1 = exp(Real(eps1));
  const Real e2 = exp(Real(eps2));
  const Real e12 = e1 * e2;
  const Real M = m, N = n;

  TwoAttrSolution s{};
  if (e12 >= (M - 1) * (N - 1)) {
    if (N * (e1 - 1) >= M * (e2 - 1)) {
      s.case_id = TwoAttrCase::I;
      const Real den = e2 + N - 1;
      s.x20 = (N * e12 + (M - 1) * (N - 1) * (e2 - 1)) / den;
      s.x21 = 1;
      s.x22 = (N * e1 - (M - 1) * (e2 - 1)) / den;
    } else {
      s.case_id = TwoAttrCase::II;
      const Real den = e1 + M - 1;
      s.x20 = (M * e12 + (M - 1) * (N - 1) * (e1 - 1)) / den;
      s.x21 = (M * e2 - (N - 1) * (e1 - 1)) / den;
      s.x22 = 1;
    }
  } else {
    const Real sign = (N - M) * e12 - M * (N - 1) * e1 + (M - 1) * N * e2;
    if (sign >= 0) {
      s.case_id = TwoAttrCase::III;
      const Real den = -(e1 - 1) * e2 + M * (N - 1);
      s.x20 = (N - 1) * (e1 + M - 1) * e2 / den;
      s.x21 = s.x20;
      s.x22 = (M * (N - 1) * e1 + (M - 1) * (e1 - 1) * e2) / den;
    } else {
      s.case_id = TwoAttrCase::IV;
      const Real den = -e1 * (e2 - 1) + (M - 1) * N;
      s.x20 = (M - 1) * e1 * (e2 + N - 1) / den;
      s.x21 = ((M - 1) * N * e2 + (N - 1) * e1 * (e2 - 1)) / den;
      s.x22 = s.x20;
    }
  }
  return s;
}

}  // namespace optrr
