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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/distortion_spec.hpp"
#include "optrr/real.hpp"
#include "optrr/rng.hpp"
#include "optrr/subset_index.hpp"
#include "optrr/types.hpp"

namespace optrr {

// A data row: one category code per attribute, v_i in {0..a_i-1}.
using Record = std::vector<int>;

inline void validate_record(const AttributeSchema& schema, const Record& rec) {
  if (static_cast<int>(rec.size()) != schema.attribute_count())
    throw std::invalid_argument("record: wrong number of attributes");
  for (int i = 0; i < schema.attribute_count(); ++i) {
    if (rec[static_cast<std::size_t>(i)] < 0 ||
        rec[static_cast<std::size_t>(i)] >= schema.domain_size(i))
      throw std::invalid_argument("record: attribute " + std::to_string(i + 1) +
                                  " value out of range");
  }
}

// Mixed-radix encoding fixing the matrix row/column order: the first
// attribute is the most significant digit.
inline std::int64_t encode_record(const AttributeSchema& schema, const Record& rec) {
  std::int64_t idx = 0;
  for (int i = 0; i < schema.attribute_count(); ++i)
    idx = idx * schema.domain_size(i) + rec[static_cast<std::size_t>(i)];
  return idx;
}

inline Record decode_record(const AttributeSchema& schema, std::int64_t idx) {
  const int k = schema.attribute_count();
  Record rec(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    rec[static_cast<std::size_t>(i)] = static_cast<int>(idx % schema.domain_size(i));
    idx /= schema.domain_size(i);
  }
  return rec;
}

// Ratio value of subset class j under either spec kind, linear domain.
inline Real class_ratio(const DistortionSpec& spec, const SubsetIndex& index, std::size_t j) {
  if (spec.kind == SpecKind::FullClasses) return spec.linear_value(j);
  const int size = index.subset_size(j);
  if (size == 0) return spec.linear_value(0);
  if (size == 1) {
    const std::uint32_t m = index.mask_of(j);
    for (int i = 0;; ++i)
      if (m >> i & 1u) return spec.linear_value(static_cast<std::size_t>(i) + 1);
  }
  return Real(1);
}

// Normalizer Z = sum_j t_j x_j; every matrix entry is x_class / Z.
inline Real normalizer(const DistortionSpec& spec, const SubsetIndex& index) {
  Real z = 0;
  for (std::size_t j = 0; j < index.class_count(); ++j)
    z += index.multiplicity(j) * class_ratio(spec, index, j);
  return z;
}

// Normalizer for collapsed-tail specs without enumerating 2^k classes:
// Z = x_0 + sum_i (a_i - 1) x_i + (prod a_i - 1 - sum_i (a_i - 1)).
inline Real normalizer_collapsed(const DistortionSpec& spec) {
  const int k = spec.schema.attribute_count();
  Real z = spec.linear_value(0);
  Real tail = spec.schema.domain_product() - 1;
  for (int i = 0; i < k; ++i) {
    const Real am1 = spec.schema.domain_size(i) - 1;
    z += am1 * spec.linear_value(static_cast<std::size_t>(i) + 1);
    tail -= am1;
  }
  return z + tail;
}

// The materialized column-stochastic distortion matrix. Column v is the
// output distribution for input record v.
struct FullMatrix {
  AttributeSchema schema;
  std::int64_t dim = 0;
  std::vector<double> p;  // column-major: p[v * dim + u]

  double at(std::int64_t u, std::int64_t v) const {
    return p[static_cast<std::size_t>(v * dim + u)];
  }
};

inline constexpr std::int64_t kDefaultMaterializeCap = 1024;  // dim^2 <= 2^20

inline FullMatrix materialize(const DistortionSpec& spec,
                              std::int64_t dim_cap = kDefaultMaterializeCap) {
  const Real dim_r = spec.schema.domain_product();
  if (dim_r > Real(dim_cap))
    throw std::invalid_argument("materialize: matrix dimension " + to_decimal_string(dim_r) +
                                " exceeds cap " + std::to_string(dim_cap));
  const std::int64_t dim = static_cast<std::int64_t>(to_double(dim_r));
  const SubsetIndex index = build_index(spec.schema);
  const Real z = normalizer(spec, index);

  // Per-class probabilities; entries depend only on the differing-subset class.
  std::vector<double> value(index.class_count());
  for (std::size_t j = 0; j < index.class_count(); ++j) {
    value[j] = to_double(class_ratio(spec, index, j) / z);
    if (!(value[j] > 0.0))
      throw std::invalid_argument("materialize: entry underflows to zero; the requested "
                                  "levels are too large for an explicit matrix");
  }

  const int k = spec.schema.attribute_count();
  std::vector<Record> decoded(static_cast<std::size_t>(dim));
  for (std::int64_t r = 0; r < dim; ++r) decoded[static_cast<std::size_t>(r)] = decode_record(spec.schema, r);

  FullMatrix mat{spec.schema, dim, {}};
  mat.p.resize(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim));
  for (std::int64_t v = 0; v < dim; ++v) {
    for (std::int64_t u = 0; u < dim; ++u) {
      std::uint32_t mask = 0;
      for (int i = 0; i < k; ++i) {
        if (decoded[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)] !=
            decoded[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)])
          mask |= 1u << i;
      }
      mat.p[static_cast<std::size_t>(v * dim + u)] = value[index.index_of_mask(mask)];
    }
  }
  return mat;
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

// Per-attribute level from the class representation: the ratio of
// sum_{j: i not in S_j} t_j x_j over sum_{j: i in S_j} t_j x_j / (a_i - 1).
inline double audit_attribute(const DistortionSpec& spec, int i) {
  const int k = spec.schema.attribute_count();
  if (i < 0 || i >= k) throw std::out_of_range("audit_attribute: attribute out of range");
  const Real am1 = spec.schema.domain_size(i) - 1;

  if (spec.kind == SpecKind::FullClasses) {
    const SubsetIndex index = build_index(spec.schema);
    Real num = 0, den = 0;
    for (std::size_t j = 0; j < index.class_count(); ++j) {
      const Real term = index.multiplicity(j) * class_ratio(spec, index, j);
      if (index.mask_of(j) >> i & 1u)
        den += term;
      else
        num += term;
    }
    return to_double(Real(log(num * am1 / den)));
  }

  // Collapsed tail: closed-form class sums.
  //   numerator  = x_0 + sum_{h != i} (a_h - 1) x_h + prod_{h != i} a_h - 1 - sum_{h != i} (a_h - 1)
  //   denominator = x_i + prod_{h != i} a_h - 1
  Real prod_rest = 1, sum_rest = 0;
  Real num = spec.linear_value(0);
  for (int h = 0; h < k; ++h) {
    if (h == i) continue;
    const Real ah_m1 = spec.schema.domain_size(h) - 1;
    prod_rest *= spec.schema.domain_size(h);
    sum_rest += ah_m1;
    num += ah_m1 * spec.linear_value(static_cast<std::size_t>(h) + 1);
  }
  num += prod_rest - 1 - sum_rest;
  const Real den = spec.linear_value(static_cast<std::size_t>(i) + 1) + prod_rest - 1;
  return to_double(Real(log(num / den)));
}

// Overall level from the class representation: ln(x_0).
inline double audit_total(const DistortionSpec& spec) { return to_double(spec.log_value(0)); }

// Matrix-path per-attribute audit: direct marginalization of the full matrix
// and maximization over value pairs. Independent of the class-sum route.
inline double audit_attribute(const FullMatrix& mat, int i) {
  const AttributeSchema& schema = mat.schema;
  const int k = schema.attribute_count();
  if (i < 0 || i >= k) throw std::out_of_range("audit_attribute: attribute out of range");
  const int ai = schema.domain_size(i);
  const std::int64_t dim = mat.dim;

  std::vector<Record> decoded(static_cast<std::size_t>(dim));
  for (std::int64_t r = 0; r < dim; ++r) decoded[static_cast<std::size_t>(r)] = decode_record(schema, r);

  // cond[u][v] extrema of Pr[Output[i]=u | Input[i]=v] over full input rows.
  std::vector<double> cond_min(static_cast<std::size_t>(ai) * static_cast<std::size_t>(ai), 0.0);
  std::vector<double> cond_max(static_cast<std::size_t>(ai) * static_cast<std::size_t>(ai), 0.0);
  std::vector<char> seen(static_cast<std::size_t>(ai) * static_cast<std::size_t>(ai), 0);
  for (std::int64_t w = 0; w < dim; ++w) {
    const int v = decoded[static_cast<std::size_t>(w)][static_cast<std::size_t>(i)];
    std::vector<double> mass(static_cast<std::size_t>(ai), 0.0);
    for (std::int64_t out = 0; out < dim; ++out)
      mass[static_cast<std::size_t>(decoded[static_cast<std::size_t>(out)][static_cast<std::size_t>(i)])] +=
          mat.at(out, w);
    for (int u = 0; u < ai; ++u) {
      const std::size_t idx = static_cast<std::size_t>(u) * static_cast<std::size_t>(ai) +
                              static_cast<std::size_t>(v);
      if (!seen[idx]) {
        seen[idx] = 1;
        cond_min[idx] = cond_max[idx] = mass[static_cast<std::size_t>(u)];
      } else {
        cond_min[idx] = std::min(cond_min[idx], mass[static_cast<std::size_t>(u)]);
        cond_max[idx] = std::max(cond_max[idx], mass[static_cast<std::size_t>(u)]);
      }
    }
  }
  double best = 1.0;
  for (int u = 0; u < ai; ++u) {
    for (int v = 0; v < ai; ++v) {
      if (u == v) continue;
      const double num =
          cond_max[static_cast<std::size_t>(u) * static_cast<std::size_t>(ai) + static_cast<std::size_t>(u)];
      const double den =
          cond_min[static_cast<std::size_t>(u) * static_cast<std::size_t>(ai) + static_cast<std::size_t>(v)];
      best = std::max(best, num / den);
    }
  }
  return std::log(best);
}

// Matrix-path overall audit: ln of the worst max/min column ratio per row.
inline double audit_total(const FullMatrix& mat) {
  double best = 1.0;
  for (std::int64_t u = 0; u < mat.dim; ++u) {
    double mx = 0.0, mn = 0.0;
    for (std::int64_t v = 0; v < mat.dim; ++v) {
      const double p = mat.at(u, v);
      if (v == 0) {
        mx = mn = p;
      } else {
        mx = std::max(mx, p);
        mn = std::min(mn, p);
      }
    }
    best = std::max(best, mx / mn);
  }
  return std::log(best);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Executes a mechanism without materializing the matrix. Construction
// precomputes the class distribution; for collapsed-tail specs the >=2-differ
// tail is handled with a three-state forward filter over attributes
// (0 / 1 / >=2 differences so far) and per-record backward sampling, O(k).
// Immutable after construction; share freely across worker threads, one Rng
// stream per worker.
class Perturber {
 public:
  explicit Perturber(const DistortionSpec& spec) : spec_(spec), k_(spec.schema.attribute_count()) {
    if (spec_.kind == SpecKind::FullClasses) {
      index_.emplace(build_index(spec_.schema));
      const Real z = normalizer(spec_, *index_);
      class_cum_.resize(index_->class_count());
      double acc = 0;
      for (std::size_t j = 0; j < index_->class_count(); ++j) {
        acc += to_double(index_->multiplicity(j) * class_ratio(spec_, *index_, j) / z);
        class_cum_[j] = acc;
      }
      class_cum_.back() = 1.0;
    } else {
      const Real z = normalizer_collapsed(spec_);
      // Head classes: identity, then one single-differ class per attribute.
      head_cum_.resize(static_cast<std::size_t>(k_) + 1);
      double acc = to_double(spec_.linear_value(0) / z);
      head_cum_[0] = acc;
      for (int i = 0; i < k_; ++i) {
        const Real am1 = spec_.schema.domain_size(i) - 1;
        acc += to_double(am1 * spec_.linear_value(static_cast<std::size_t>(i) + 1) / z);
        head_cum_[static_cast<std::size_t>(i) + 1] = acc;
      }

      // Forward filter: f[i][s] = total subset weight over the first i
      // attributes with s in {0, 1, >=2} differences, weight (a_i - 1) per
      // differing attribute. f[k][2] recovers the tail multiplicity.
      fwd_.assign(static_cast<std::size_t>(k_) + 1, {Real(0), Real(0), Real(0)});
      fwd_[0][0] = 1;
      for (int i = 1; i <= k_; ++i) {
        const Real am1 = spec_.schema.domain_size(i - 1) - 1;
        fwd_[static_cast<std::size_t>(i)][0] = fwd_[static_cast<std::size_t>(i) - 1][0];
        fwd_[static_cast<std::size_t>(i)][1] =
            fwd_[static_cast<std::size_t>(i) - 1][1] + fwd_[static_cast<std::size_t>(i) - 1][0] * am1;
        fwd_[static_cast<std::size_t>(i)][2] =
            fwd_[static_cast<std::size_t>(i) - 1][2] * (am1 + 1) +
            fwd_[static_cast<std::size_t>(i) - 1][1] * am1;
      }

      // Backward-sampling tables: for attribute i and current state s, the
      // probability that attribute i differs (and the predecessor state).
      // Record-independent, so they are shared by all draws.
      p_differ_.assign(static_cast<std::size_t>(k_) + 1, {0.0, 0.0, 0.0});
      p_from_one_.assign(static_cast<std::size_t>(k_) + 1, 0.0);
      for (int i = k_; i >= 1; --i) {
        const Real am1 = spec_.schema.domain_size(i - 1) - 1;
        const auto& prev = fwd_[static_cast<std::size_t>(i) - 1];
        // state 1: predecessor 1 (same) or 0 (differ)
        {
          const Real differ = prev[0] * am1;
          const Real total = differ + prev[1];
          p_differ_[static_cast<std::size_t>(i)][1] = total > 0 ? to_double(differ / total) : 0.0;
        }
        // state >=2: predecessor 2 (same or differ) or 1 (differ)
        {
          const Real differ = prev[2] * am1 + prev[1] * am1;
          const Real total = differ + prev[2];
          p_differ_[static_cast<std::size_t>(i)][2] = total > 0 ? to_double(differ / total) : 0.0;
          // Conditional on differing in state >=2, predecessor was 1 with:
          const Real from_one = prev[1] * am1;
          p_from_one_[static_cast<std::size_t>(i)] =
              differ > 0 ? to_double(from_one / differ) : 0.0;
        }
      }
    }
  }

  const DistortionSpec& spec() const { return spec_; }

  Record operator()(const Record& input, Rng& rng) const {
    validate_record(spec_.schema, input);
    Record out = input;
    if (spec_.kind == SpecKind::FullClasses) {
      const double u = rng.uniform01();
      std::size_t j = static_cast<std::size_t>(
          std::lower_bound(class_cum_.begin(), class_cum_.end(), u) - class_cum_.begin());
      if (j >= class_cum_.size()) j = class_cum_.size() - 1;
      const std::uint32_t mask = index_->mask_of(j);
      for (int i = 0; i < k_; ++i)
        if (mask >> i & 1u) replace(out, i, rng);
      return out;
    }

    const double u = rng.uniform01();
    const std::size_t pick = static_cast<std::size_t>(
        std::lower_bound(head_cum_.begin(), head_cum_.end(), u) - head_cum_.begin());
    if (pick == 0) return out;                       // identity class
    if (pick <= static_cast<std::size_t>(k_)) {     // exactly one attribute differs
      replace(out, static_cast<int>(pick) - 1, rng);
      return out;
    }
    // Tail: backward-sample the differing subset conditioned on >=2 differences.
    int state = 2;
    for (int i = k_; i >= 1; --i) {
      bool differ = false;
      if (state == 0) {
        differ = false;
      } else if (state == 1) {
        differ = rng.uniform01() < p_differ_[static_cast<std::size_t>(i)][1];
        if (differ) state = 0;
      } else {
        differ = rng.uniform01() < p_differ_[static_cast<std::size_t>(i)][2];
        if (differ && rng.uniform01() < p_from_one_[static_cast<std::size_t>(i)]) state = 1;
      }
      if (differ) replace(out, i - 1, rng);
    }
    return out;
  }

 private:
  void replace(Record& rec, int attr, Rng& rng) const {
    const int a = spec_.schema.domain_size(attr);
    // Uniform over the a-1 values different from the current one.
    int v = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(a - 1)));
    if (v >= rec[static_cast<std::size_t>(attr)]) ++v;
    rec[static_cast<std::size_t>(attr)] = v;
  }

  DistortionSpec spec_;
  int k_;
  std::optional<SubsetIndex> index_;
  std::vector<double> class_cum_;                 // full-classes cumulative
  std::vector<double> head_cum_;                  // collapsed head cumulative
  std::vector<std::array<Real, 3>> fwd_;          // forward filter table
  std::vector<std::array<double, 3>> p_differ_;   // backward tables
  std::vector<double> p_from_one_;

 public:
  // Exposed for tests: total tail weight from the forward pass.
  Real tail_weight() const { return fwd_.empty() ? Real(0) : fwd_.back()[2]; }
};

// One-off convenience wrapper; bulk callers should reuse a Perturber.
inline Record perturb(const Record& input, const DistortionSpec& spec, Rng& rng) {
  return Perturber(spec)(input, rng);
}

}  // namespace optrr
