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

#include <chrono>
#include <utility>

#include "optrr/distortion_spec.hpp"
#include "optrr/inductive.hpp"
#include "optrr/kronecker.hpp"
#include "optrr/lp_solve.hpp"
#include "optrr/types.hpp"

namespace optrr {

struct BuiltMechanism {
  DistortionSpec spec;
  MechanismReport report;
};

// Builds a mechanism with the chosen method and fills in the report.
inline BuiltMechanism build_mechanism(const AttributeSchema& schema, const PrivacyBudget& budget,
                                      Method method, const LpOptions& lp_opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  InductionStats stats;
  DistortionSpec spec = [&] {
    switch (method) {
      case Method::OptimalLp: return solve_optimal(schema, budget, lp_opt);
      case Method::Heuristic: return heuristic_build(schema, budget, &stats);
      case Method::Kronecker: return kronecker_spec(schema, budget);
    }
    throw std::logic_error("unreachable");
  }();

  MechanismReport report;
  report.requested_eps = budget.levels();
  report.achieved_eps = spec.achieved_eps;
  report.eps_total = to_double(spec.log_value(0));
  report.method = method;
  report.fallback_fired = !stats.fallback_levels.empty();
  report.build_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return BuiltMechanism{std::move(spec), std::move(report)};
}

}  // namespace optrr
