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

#include "optrr/subset_index.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "optrr/rng.hpp"

namespace optrr {
namespace {

TEST(SubsetIndex, CanonicalOrderForThreeAttributes) {
  const SubsetIndex idx = build_index(AttributeSchema({3, 4, 5}));
  ASSERT_EQ(idx.class_count(), 8u);
  const std::vector<std::vector<int>> expected = {
      {}, {0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}};
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(idx.subset_of(j), expected[j]);
}

TEST(SubsetIndex, MultiplicitiesForThreeAttributes) {
  // a = (3, 4, 5): counts 1, a1-1, a2-1, a3-1, (a1-1)(a2-1), (a1-1)(a3-1),
  // (a2-1)(a3-1), (a1-1)(a2-1)(a3-1).
  const SubsetIndex idx = build_index(AttributeSchema({3, 4, 5}));
  const std::vector<int> expected = {1, 2, 3, 4, 6, 8, 12, 24};
  for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(idx.multiplicity(j), Real(expected[j]));
}

TEST(SubsetIndex, SingleAttribute) {
  const SubsetIndex idx = build_index(AttributeSchema({4}));
  ASSERT_EQ(idx.class_count(), 2u);
  EXPECT_EQ(idx.multiplicity(0), Real(1));
  EXPECT_EQ(idx.multiplicity(1), Real(3));
  EXPECT_EQ(idx.multiplicity(0) + idx.multiplicity(1), Real(4));
}

TEST(SubsetIndex, BinaryAttributesAllMultiplicitiesOne) {
  const SubsetIndex idx = build_index(AttributeSchema({2, 2, 2}));
  Real total = 0;
  for (std::size_t j = 0; j < idx.class_count(); ++j) {
    EXPECT_EQ(idx.multiplicity(j), Real(1));
    total += idx.multiplicity(j);
  }
  EXPECT_EQ(total, Real(8));
}

TEST(SubsetIndex, SpecificClassesFromTheLattice) {
  const SubsetIndex k3 = build_index(AttributeSchema({2, 2, 2}));
  EXPECT_EQ(k3.subset_of(4), (std::vector<int>{0, 1}));  // first and second differ
  EXPECT_EQ(k3.subset_of(0), std::vector<int>{});

  const SubsetIndex k5 = build_index(AttributeSchema({2, 2, 2, 2, 2}));
  EXPECT_EQ(k5.subset_of((1u << 5) - 1), (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(SubsetIndex, BlockOffsetsMatchBinomialPrefixSums) {
  for (int k = 1; k <= 12; ++k) {
    const SubsetIndex idx = build_index(AttributeSchema(std::vector<int>(k, 2)));
    std::size_t acc = 1;
    for (int h = 0; h < k; ++h) {
      EXPECT_EQ(idx.block_offset(h), acc) << "k=" << k << " h=" << h;
      acc += idx.choose(k, h + 1);
    }
    EXPECT_EQ(idx.block_offset(k - 1), (std::size_t{1} << k) - 1);
    // Strictly increasing block offsets.
    for (int h = 1; h < k; ++h) EXPECT_LT(idx.block_offset(h - 1), idx.block_offset(h));
  }
}

TEST(SubsetIndex, RoundTripExhaustive) {
  for (int k = 1; k <= 12; ++k) {
    const SubsetIndex idx = build_index(AttributeSchema(std::vector<int>(k, 3)));
    int prev_size = 0;
    for (std::size_t j = 0; j < idx.class_count(); ++j) {
      EXPECT_EQ(idx.index_of(idx.subset_of(j)), j) << "k=" << k << " j=" << j;
      // Sizes are non-decreasing across the ordering.
      EXPECT_GE(idx.subset_size(j), prev_size);
      prev_size = idx.subset_size(j);
    }
  }
}

TEST(SubsetIndex, MultiplicitySumEqualsDomainProduct) {
  Rng rng(20260810);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = rng.uniform_int(1, 12);
    std::vector<int> a(k);
    for (int& ai : a) ai = rng.uniform_int(2, 6);
    const AttributeSchema schema(a);
    const SubsetIndex idx = build_index(schema);
    Real total = 0;
    for (std::size_t j = 0; j < idx.class_count(); ++j) total += idx.multiplicity(j);
    EXPECT_EQ(total, schema.domain_product()) << "trial " << trial;
  }
}

TEST(SubsetIndex, RejectsDegenerateSchemas) {
  EXPECT_THROW(AttributeSchema({}), std::invalid_argument);
  EXPECT_THROW(AttributeSchema({3, 1, 2}), std::invalid_argument);
  EXPECT_THROW(AttributeSchema({0}), std::invalid_argument);
}

TEST(SubsetIndex, RangeChecks) {
  const SubsetIndex idx = build_index(AttributeSchema({2, 2}));
  EXPECT_THROW(idx.subset_of(4), std::out_of_range);
  EXPECT_THROW(idx.index_of({5}), std::out_of_range);
}

}  // namespace
}  // namespace optrr
