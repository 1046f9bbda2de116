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

#include "optrr/real.hpp"
#include "optrr/types.hpp"

namespace optrr {

// Canonical indexing of the 2^k "differing-attribute subset" classes.
//
// Class 0 is the empty subset (input == output). Classes are ordered by
// subset size and lexicographically within a size, so for k = 3 the order is
// {}, {1}, {2}, {3}, {1,2}, {1,3}, {2,3}, {1,2,3}. Attribute members are
// 0-based in code. Immutable after construction; safe to share across threads.
class SubsetIndex {
 public:
  // Structural cap: class tables are materialized, so 2^k must stay small.
  static constexpr int kMaxAttributes = 20;

  static SubsetIndex build(const AttributeSchema& schema) { return SubsetIndex(schema); }

  int attribute_count() const { return k_; }
  std::size_t class_count() const { return masks_.size(); }  // 2^k

  // Bitmask of class j: bit i set <=> attribute i differs.
  std::uint32_t mask_of(std::size_t j) const {
    check_class(j);
    return masks_[j];
  }

  // Members of S_j as sorted 0-based attribute positions.
  std::vector<int> subset_of(std::size_t j) const {
    check_class(j);
    std::vector<int> out;
    for (int i = 0; i < k_; ++i)
      if (masks_[j] >> i & 1u) out.push_back(i);
    return out;
  }

  int subset_size(std::size_t j) const {
    check_class(j);
    return sizes_[j];
  }

  // Inverse of subset_of under the canonical order.
  std::size_t index_of(const std::vector<int>& subset) const {
    std::uint32_t m = 0;
    for (int i : subset) {
      if (i < 0 || i >= k_) throw std::out_of_range("index_of: attribute out of range");
      m |= 1u << i;
    }
    return index_of_mask(m);
  }

  std::size_t index_of_mask(std::uint32_t m) const {
    int h = 0;
    for (int i = 0; i < k_; ++i) h += (m >> i) & 1;
    // Lexicographic rank of the sorted member tuple among h-subsets of {0..k-1}.
    std::size_t rank = 0;
    int seen = 0, prev = -1;
    for (int v = 0; v < k_ && seen < h; ++v) {
      if (m >> v & 1u) {
        for (int w = prev + 1; w < v; ++w) rank += choose(k_ - 1 - w, h - seen - 1);
        prev = v;
        ++seen;
      }
    }
    return block_start_[h] + rank;
  }

  // Multiplicity t_j = prod_{s in S_j} (a_s - 1); t_0 = 1. Exact.
  const Real& multiplicity(std::size_t j) const {
    check_class(j);
    return t_[j];
  }

  // First class index whose subset has size h+1 (h in 0..k-1); the final
  // entry equals 2^k - 1, the full-set class.
  std::size_t block_offset(int h) const {
    if (h < 0 || h >= k_) throw std::out_of_range("block_offset: h out of range");
    return block_start_[h + 1];
  }

  // First class of size s, for s in 0..k (block_start(k) = 2^k - 1).
  std::size_t block_start(int s) const { return block_start_.at(static_cast<std::size_t>(s)); }

  // Number of h-subsets, C(k, h).
  std::size_t block_size(int s) const { return block_start_.at(s + 1) - block_start_.at(s); }

  std::size_t choose(int n, int r) const {
    if (r < 0 || r > n) return 0;
    return binom_[static_cast<std::size_t>(n)][static_cast<std::size_t>(r)];
  }

  const AttributeSchema& schema() const { return schema_; }

 private:
  explicit SubsetIndex(const AttributeSchema& schema) : schema_(schema) {
    k_ = schema.attribute_count();
    if (k_ < 1) throw std::invalid_argument("subset index: k must be >= 1");
    if (k_ > kMaxAttributes) {
      throw std::invalid_argument("subset index: k = " + std::to_string(k_) +
                                  " exceeds the structural cap of " +
                                  std::to_string(kMaxAttributes) +
                                  " (2^k classes are materialized)");
    }
    binom_.assign(static_cast<std::size_t>(k_) + 1,
                  std::vector<std::size_t>(static_cast<std::size_t>(k_) + 1, 0));
    for (int n = 0; n <= k_; ++n) {
      binom_[n][0] = 1;
      for (int r = 1; r <= n; ++r)
        binom_[n][r] = binom_[n - 1][r - 1] + (r <= n - 1 ? binom_[n - 1][r] : 0);
    }

    block_start_.assign(static_cast<std::size_t>(k_) + 2, 0);
    for (int s = 0; s <= k_; ++s) block_start_[s + 1] = block_start_[s] + choose(k_, s);

    const std::size_t total = std::size_t{1} << k_;
    masks_.reserve(total);
    for (int s = 0; s <= k_; ++s) emit_size_block(s);

    sizes_.resize(total);
    t_.resize(total);
    for (std::size_t j = 0; j < total; ++j) {
      int h = 0;
      Real t = 1;
      for (int i = 0; i < k_; ++i) {
        if (masks_[j] >> i & 1u) {
          ++h;
          t *= schema.domain_size(i) - 1;
        }
      }
      sizes_[j] = h;
      t_[j] = t;
    }
  }

  // Append all size-s subsets in lexicographic order of their sorted tuples.
  void emit_size_block(int s) {
    std::vector<int> cur(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) cur[i] = i;
    if (s == 0) {
      masks_.push_back(0);
      return;
    }
    while (true) {
      std::uint32_t m = 0;
      for (int v : cur) m |= 1u << v;
      masks_.push_back(m);
      int pos = s - 1;
      while (pos >= 0 && cur[pos] == k_ - s + pos) --pos;
      if (pos < 0) break;
      ++cur[pos];
      for (int q = pos + 1; q < s; ++q) cur[q] = cur[q - 1] + 1;
    }
  }

  void check_class(std::size_t j) const {
    if (j >= masks_.size()) throw std::out_of_range("class index out of range");
  }

  AttributeSchema schema_;
  int k_ = 0;
  std::vector<std::uint32_t> masks_;       // class -> member bitmask
  std::vector<int> sizes_;                 // class -> |S_j|
  std::vector<Real> t_;                    // class -> multiplicity
  std::vector<std::size_t> block_start_;   // size -> first class index
  std::vector<std::vector<std::size_t>> binom_;
};

inline SubsetIndex build_index(const AttributeSchema& schema) { return SubsetIndex::build(schema); }

}  // namespace optrr
