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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/build.hpp"
#include "optrr/types.hpp"

namespace optrr {

struct CalibrationResult {
  PrivacyBudget budget;       // eps_i = s * w_i at the accepted scale
  double achieved_total = 0;  // audit of the mechanism built at that scale
  int probes = 0;             // number of construction probes
};

// Inverts a construction: finds the largest scale s such that the overall
// level of the mechanism built with eps_i = s * w_i stays within eps_total.
// Kronecker composes additively, so its scale is closed-form; the other
// methods are bisected. ln(x_0) is checked to be monotone across probes
// rather than assumed.
inline CalibrationResult calibrate(const AttributeSchema& schema, const std::vector<double>& weights,
                                   double eps_total, Method method, const LpOptions& lp_opt = {},
                                   double rel_tol = 1e-6) {
  if (!(eps_total > 0)) throw std::invalid_argument("calibrate: eps_total must be positive");
  if (static_cast<int>(weights.size()) != schema.attribute_count())
    throw std::invalid_argument("calibrate: weight count does not match schema");
  double wsum = 0;
  for (double w : weights) {
    if (!(w > 0)) throw std::invalid_argument("calibrate: weights must be positive");
    wsum += w;
  }

  auto budget_at = [&](double s) {
    std::vector<double> eps(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) eps[i] = s * weights[i];
    return PrivacyBudget(eps);
  };

  if (method == Method::Kronecker) {
    const double s = eps_total / wsum;
    return CalibrationResult{budget_at(s), eps_total, 0};
  }

  int probes = 0;
  auto total_at = [&](double s) {
    ++probes;
    // The achieved total already reflects any heuristic fallback.
    return build_mechanism(schema, budget_at(s), method, lp_opt).report.eps_total;
  };

  // The Kronecker scale is always feasible (the constructions never compose
  // worse than additively).
  double s_lo = eps_total / wsum;
  double f_lo = total_at(s_lo);
  if (f_lo > eps_total * (1 + 1e-12))
    throw std::runtime_error("calibrate: construction exceeded the additive bound at the "
                             "Kronecker scale (non-monotone audit?)");

  double s_hi = s_lo;
  double f_hi = f_lo;
  for (int i = 0; i < 200 && f_hi <= eps_total; ++i) {
    s_hi *= 2;
    const double f = total_at(s_hi);
    if (f < f_hi - 1e-9 * (1 + std::abs(f_hi)))
      throw std::runtime_error("calibrate: ln(x_0) decreased when scaling the budget up");
    f_hi = f;
  }
  if (f_hi <= eps_total)
    throw std::runtime_error("calibrate: could not bracket the target level");

  for (int i = 0; i < 200 && (s_hi - s_lo) > rel_tol * s_lo; ++i) {
    const double mid = 0.5 * (s_lo + s_hi);
    const double f = total_at(mid);
    if (f < f_lo - 1e-9 * (1 + std::abs(f_lo)) || f > f_hi + 1e-9 * (1 + std::abs(f_hi)))
      throw std::runtime_error("calibrate: ln(x_0) is not monotone between brackets");
    if (f <= eps_total) {
      s_lo = mid;
      f_lo = f;
    } else {
      s_hi = mid;
      f_hi = f;
    }
  }
  return CalibrationResult{budget_at(s_lo), f_lo, probes};
}

}  // namespace optrr
