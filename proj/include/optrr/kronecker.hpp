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
#include <string>

#include "optrr/distortion_spec.hpp"
#include "optrr/real.hpp"
#include "optrr/subset_index.hpp"
#include "optrr/types.hpp"

namespace optrr {

// Baseline mechanism: the Kronecker product of the per-attribute matrices
// with diagonal e^{eps_i}/(e^{eps_i}+a_i-1). In the class representation the
// ratio for class j is x_j = e^{sum of eps_i over the attributes that do NOT
// differ}, so the overall level is exactly sum eps_i.
inline DistortionSpec kronecker_spec(const AttributeSchema& schema, const PrivacyBudget& budget) {
  budget.check_matches(schema);
  const int k = schema.attribute_count();
  const SubsetIndex index = build_index(schema);  // caps k (2^k classes are explicit)

  DistortionSpec spec{schema};
  spec.kind = SpecKind::FullClasses;
  spec.method = Method::Kronecker;
  spec.achieved_eps = budget.levels();
  spec.x.resize(index.class_count());
  for (std::size_t j = 0; j < index.class_count(); ++j) {
    Real s = 0;
    for (int i = 0; i < k; ++i)
      if (!(index.mask_of(j) >> i & 1u)) s += budget.level(i);
    spec.x[j] = exp(s);
  }
  spec.x.back() = 1;
  validate_spec(spec, 1e-30);
  return spec;
}

}  // namespace optrr
