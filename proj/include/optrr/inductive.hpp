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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/distortion_spec.hpp"
#include "optrr/real.hpp"
#include "optrr/two_attribute.hpp"
#include "optrr/types.hpp"

namespace optrr {

// Instrumentation for the inductive construction; real_ops counts
// extended-precision arithmetic operations (quadratic in k by design).
struct InductionStats {
  std::uint64_t real_ops = 0;
  std::vector<int> fallback_levels;  // 1-based levels where the repair fired
};

// State after consuming the first `level` attributes: the collapsed-tail
// values x_{i,0}..x_{i,i}, running accumulators over the consumed domain
// sizes, and the per-attribute levels actually guaranteed so far.
struct InductionState {
  int level = 0;                     // i
  std::vector<Real> x;               // x_{i,0..i}
  std::vector<int> a;                // consumed domain sizes a_1..a_i
  Real prod_a = 1;                   // prod_{h<=i} a_h
  Real sum_a = 0;                    // sum_{h<=i} a_h
  std::vector<double> achieved_eps;  // eps_1..eps_i
  bool fallback_fired = false;
};

namespace detail {
// The affine update x -> a x - a + 1 has fixed point 1 with multiplier a, so
// a value that rounds an ulp below 1 would be amplified by prod a_i across
// the levels. Values provably >= 1 that land within rounding distance of 1
// are snapped back to the exact fixed point.
inline void snap_to_one(Real& v) {
  if (v != 1 && abs(v - 1) < Real("1e-30")) v = 1;
}
}  // namespace detail

// Base case: the exact two-attribute optimum.
inline InductionState induction_base(int a1, int a2, double eps1, double eps2) {
  const TwoAttrSolution s = optimal_two(a1, a2, eps1, eps2);
  InductionState st;
  st.level = 2;
  st.x = {s.x20, s.x21, s.x22};
  for (Real& v : st.x) detail::snap_to_one(v);
  st.a = {a1, a2};
  st.prod_a = Real(a1) * a2;
  st.sum_a = Real(a1) + a2;
  st.achieved_eps = {eps1, eps2};
  return st;
}

// One induction step: extend an (i-1)-attribute solution by attribute i with
// domain size a_i and requested level eps_i. The single-differ values are
// mapped through x_{i,j} = a_i x_{i-1,j} - a_i + 1, then (x_{i,0}, x_{i,i})
// solve the 2x2 system pairing the tail relation with the level-i equality.
// When the solved pair breaks the monotone chain, the repair pins
// x_{i,i} = 1, rescales x_{i,0}, and reports the level actually guaranteed.
inline void induction_step(InductionState& st, int a_i, double eps_i,
                           InductionStats* stats = nullptr) {
  if (a_i < 2) throw std::invalid_argument("induction_step: domain size must be >= 2");
  if (!(eps_i > 0)) throw std::invalid_argument("induction_step: eps must be positive");

  std::uint64_t ops = 0;
  const int i = st.level + 1;
  const Real A_i = a_i;

  // Accumulators over the previous i-1 attributes.
  const Real B = st.prod_a - st.sum_a + (i - 2);
  const Real C = st.prod_a - 1;
  ops += 4;

  std::vector<Real> x_new(static_cast<std::size_t>(i) + 1);
  Real A = 0;
  Real max_prev = 0;
  for (int j = 1; j <= i - 1; ++j) {
    x_new[static_cast<std::size_t>(j)] = A_i * st.x[static_cast<std::size_t>(j)] - A_i + 1;
    detail::snap_to_one(x_new[static_cast<std::size_t>(j)]);
    A += (st.a[static_cast<std::size_t>(j - 1)] - 1) * x_new[static_cast<std::size_t>(j)];
    if (x_new[static_cast<std::size_t>(j)] > max_prev) max_prev = x_new[static_cast<std::size_t>(j)];
    ops += 5;
  }

  const Real e_i = exp(Real(eps_i));
  const Real x_prev0 = st.x[0];
  // Determinant of the 2x2 system is -(a_i - 1) - e^{eps_i}, never zero.
  Real x_ii = (A_i * x_prev0 + A + B - e_i * C) / (A_i - 1 + e_i);
  Real x_i0 = A_i * x_prev0 - (A_i - 1) * x_ii;
  ops += 12;

  double achieved = eps_i;
  if (x_i0 < 1 || x_ii < 1 || x_i0 < max_prev || x_i0 < x_ii) {
    x_i0 = A_i * x_prev0 - A_i + 1;
    x_ii = 1;
    const Real ratio = (x_i0 + A + B) / (x_ii + C);
    achieved = to_double(Real(log(ratio)));
    ops += 8;
    st.fallback_fired = true;
    if (stats) stats->fallback_levels.push_back(i);
  }

  detail::snap_to_one(x_i0);
  detail::snap_to_one(x_ii);
  x_new[0] = x_i0;
  x_new[static_cast<std::size_t>(i)] = x_ii;
  st.x = std::move(x_new);
  st.a.push_back(a_i);
  st.prod_a *= a_i;
  st.sum_a += a_i;
  ops += 2;
  st.achieved_eps.push_back(achieved);
  st.level = i;
  if (stats) stats->real_ops += ops;
}

// Full inductive construction (near privacy-optimized collapsed-tail spec).
// `order`, when given, is the processing permutation over attributes; the
// result is reported against the original attribute positions either way.
inline DistortionSpec heuristic_build(const AttributeSchema& schema, const PrivacyBudget& budget,
                                      InductionStats* stats = nullptr,
                                      const std::vector<int>* order = nullptr) {
  budget.check_matches(schema);
  const int k = schema.attribute_count();
  if (k < 2)
    throw std::invalid_argument("heuristic_build: k must be >= 2 (single attributes have a "
                                "closed-form mechanism)");

  std::vector<int> perm;
  if (order) {
    perm = *order;
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    if (static_cast<int>(perm.size()) != k)
      throw std::invalid_argument("heuristic_build: order length must equal k");
    for (int p : perm) {
      if (p < 0 || p >= k || seen[static_cast<std::size_t>(p)])
        throw std::invalid_argument("heuristic_build: order must be a permutation of 0..k-1");
      seen[static_cast<std::size_t>(p)] = 1;
    }
  } else {
    perm.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
  }

  InductionState st = induction_base(schema.domain_size(perm[0]), schema.domain_size(perm[1]),
                                     budget.level(perm[0]), budget.level(perm[1]));
  if (stats) stats->real_ops += 24;  // base-case closed form
  for (int pos = 2; pos < k; ++pos)
    induction_step(st, schema.domain_size(perm[static_cast<std::size_t>(pos)]),
                   budget.level(perm[static_cast<std::size_t>(pos)]), stats);

  DistortionSpec spec{schema};
  spec.kind = SpecKind::CollapsedTail;
  spec.method = Method::Heuristic;
  spec.x.resize(static_cast<std::size_t>(k) + 1);
  spec.achieved_eps.resize(static_cast<std::size_t>(k));
  spec.x[0] = st.x[0];
  for (int pos = 0; pos < k; ++pos) {
    const int attr = perm[static_cast<std::size_t>(pos)];
    spec.x[static_cast<std::size_t>(attr) + 1] = st.x[static_cast<std::size_t>(pos) + 1];
    spec.achieved_eps[static_cast<std::size_t>(attr)] = st.achieved_eps[static_cast<std::size_t>(pos)];
  }
  // Cancellation in the closed forms can leave values an ulp under 1.
  validate_spec(spec, 1e-30);
  return spec;
}

}  // namespace optrr
