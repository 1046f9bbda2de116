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

#include "optrr/json_io.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "optrr/inductive.hpp"
#include "optrr/kronecker.hpp"
#include "optrr/rng.hpp"

namespace optrr {
namespace {

TEST(RealType, DecimalStringRoundTripIsExact) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Real v = Real(rng.uniform01()) * exp(Real(rng.uniform_real(-200.0, 200.0)));
    if (trial % 3 == 0) v = v * v * v;  // push the exponent around
    const Real back = real_from_string(to_decimal_string(v));
    EXPECT_EQ(back, v);
  }
  // Values far outside double range round-trip too.
  const Real huge = exp(Real(50000));
  EXPECT_EQ(real_from_string(to_decimal_string(huge)), huge);
}

TEST(SpecJson, RoundTripBitIdentical) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = rng.uniform_int(2, 8);
    std::vector<int> a(k);
    std::vector<double> eps(k);
    for (int i = 0; i < k; ++i) {
      a[i] = rng.uniform_int(2, 6);
      eps[i] = rng.uniform_real(0.3, 6.0);
    }
    const DistortionSpec spec = heuristic_build(AttributeSchema(a), PrivacyBudget(eps));
    const DistortionSpec back = spec_from_json(spec_to_json(spec));
    ASSERT_EQ(back.x.size(), spec.x.size());
    for (std::size_t j = 0; j < spec.x.size(); ++j) EXPECT_EQ(back.x[j], spec.x[j]);
    EXPECT_EQ(back.achieved_eps, spec.achieved_eps);
    EXPECT_EQ(back.kind, spec.kind);
    EXPECT_EQ(back.method, spec.method);
    EXPECT_EQ(back.log_scale, spec.log_scale);
    EXPECT_EQ(back.schema.domain_sizes(), spec.schema.domain_sizes());
  }
}

TEST(SpecJson, FullClassesRoundTrip) {
  const DistortionSpec spec =
      kronecker_spec(AttributeSchema({3, 2, 4}), PrivacyBudget({1.0, 2.0, 0.5}));
  const DistortionSpec back = spec_from_json(spec_to_json(spec));
  for (std::size_t j = 0; j < spec.x.size(); ++j) EXPECT_EQ(back.x[j], spec.x[j]);
}

TEST(SpecValidation, TotalLevelIsNonNegative) {
  const DistortionSpec spec = heuristic_build(AttributeSchema({3, 3}), PrivacyBudget({1.0, 1.0}));
  EXPECT_GE(spec.eps_total(), 0.0);
}

TEST(SpecValidation, RejectsBrokenChain) {
  DistortionSpec spec{AttributeSchema({3, 3})};
  spec.kind = SpecKind::CollapsedTail;
  spec.achieved_eps = {1.0, 1.0};
  spec.x = {Real(2), Real(3), Real(1)};  // x_1 above x_0
  EXPECT_THROW(validate_spec(spec), std::invalid_argument);
  spec.x = {Real(3), Real(2), Real("0.5")};  // below 1
  EXPECT_THROW(validate_spec(spec), std::invalid_argument);
  spec.x = {Real(3), Real(2), Real(1)};
  EXPECT_NO_THROW(validate_spec(spec));
}

TEST(SpecValidation, ReferenceClassMustBeOne) {
  DistortionSpec spec{AttributeSchema({2, 2})};
  spec.kind = SpecKind::FullClasses;
  spec.achieved_eps = {1.0, 1.0};
  spec.x = {Real(4), Real(2), Real(2), Real("1.5")};
  EXPECT_THROW(validate_spec(spec), std::invalid_argument);
}

TEST(SpecScale, LogLinearConversionsAgree) {
  const DistortionSpec spec =
      heuristic_build(AttributeSchema({4, 4, 4}), PrivacyBudget({2.0, 3.0, 1.0}));
  const DistortionSpec logd = spec.to_log_scale();
  EXPECT_TRUE(logd.log_scale);
  EXPECT_NEAR(logd.eps_total(), spec.eps_total(), 1e-12);
  const DistortionSpec lin = logd.to_linear_scale();
  for (std::size_t j = 0; j < spec.x.size(); ++j) {
    EXPECT_NEAR(to_double(lin.x[j] / spec.x[j]), 1.0, 1e-30);
  }
  // The log form serializes and validates as well.
  const DistortionSpec back = spec_from_json(spec_to_json(logd));
  EXPECT_TRUE(back.log_scale);
  EXPECT_NO_THROW(validate_spec(back));
}

}  // namespace
}  // namespace optrr
