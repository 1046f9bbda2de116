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

#include "optrr/calibrate.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "optrr/mechanism.hpp"

namespace optrr {
namespace {

TEST(Calibrate, KroneckerUniformWeightsClosedForm) {
  const AttributeSchema schema(std::vector<int>(7, 5));
  const CalibrationResult res =
      calibrate(schema, std::vector<double>(7, 1.0), 20.0, Method::Kronecker);
  for (double e : res.budget.levels()) EXPECT_NEAR(e, 20.0 / 7, 1e-12);
  EXPECT_EQ(res.probes, 0);
}

TEST(Calibrate, WeightsScaleTheKroneckerAllocation) {
  const AttributeSchema schema({4, 4, 4});
  const CalibrationResult res = calibrate(schema, {1.0, 2.0, 5.0}, 16.0, Method::Kronecker);
  EXPECT_NEAR(res.budget.level(0), 2.0, 1e-12);
  EXPECT_NEAR(res.budget.level(1), 4.0, 1e-12);
  EXPECT_NEAR(res.budget.level(2), 10.0, 1e-12);
}

TEST(Calibrate, OptimalLpInvertsTheBinaryIdentity) {
  // x_0 = 2 e^{eps} - 1 at m = n = 2: a total of ln 3 calibrates to
  // eps_1 = eps_2 = ln 2.
  const CalibrationResult res =
      calibrate(AttributeSchema({2, 2}), {1.0, 1.0}, std::log(3.0), Method::OptimalLp);
  EXPECT_NEAR(res.budget.level(0), std::log(2.0), 1e-5);
  EXPECT_NEAR(res.budget.level(1), std::log(2.0), 1e-5);
}

TEST(Calibrate, AchievedTotalLandsJustBelowTheTarget) {
  const AttributeSchema schema(std::vector<int>(5, 4));
  for (Method method : {Method::Heuristic, Method::OptimalLp}) {
    const CalibrationResult res =
        calibrate(schema, std::vector<double>(5, 1.0), 12.0, method);
    const BuiltMechanism built = build_mechanism(schema, res.budget, method);
    EXPECT_LE(built.report.eps_total, 12.0 * (1 + 1e-12)) << method_name(method);
    EXPECT_GE(built.report.eps_total, 12.0 * (1 - 1e-5)) << method_name(method);
  }
}

TEST(Calibrate, OptimizedMethodsDistributeMoreBudgetThanKronecker) {
  // At k = 7 and a fixed overall level, the optimized constructions afford
  // roughly twice the additive allocation.
  const AttributeSchema schema(std::vector<int>(7, 5));
  const double total = 20.0;
  const CalibrationResult heur =
      calibrate(schema, std::vector<double>(7, 1.0), total, Method::Heuristic);
  double sum = 0;
  for (double e : heur.budget.levels()) sum += e;
  EXPECT_GE(sum, 1.4 * total);
  EXPECT_LE(sum, 4.0 * total);
  // Per-attribute budgets never fall below the additive allocation.
  for (double e : heur.budget.levels()) EXPECT_GE(e, total / 7 - 1e-9);
}

TEST(Calibrate, InputValidation) {
  const AttributeSchema schema({3, 3});
  EXPECT_THROW(calibrate(schema, {1.0}, 5.0, Method::Kronecker), std::invalid_argument);
  EXPECT_THROW(calibrate(schema, {1.0, -1.0}, 5.0, Method::Kronecker), std::invalid_argument);
  EXPECT_THROW(calibrate(schema, {1.0, 1.0}, 0.0, Method::Kronecker), std::invalid_argument);
}

}  // namespace
}  // namespace optrr
