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
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/real.hpp"
#include "optrr/subset_index.hpp"
#include "optrr/types.hpp"

namespace optrr {

// One inequality row: -x[neg] + x[pos] <= b, with pos < 0 meaning the +1
// entry is absent (the x_j >= 1 rows for the size k-1 classes).
struct UbRow {
  int neg = 0;
  int pos = -1;
};

struct InequalitySystem {
  int num_vars = 0;            // 2^k - 1
  std::vector<UbRow> rows;     // k * 2^{k-1} rows, in construction order
  std::vector<double> b;

  // Dense row materialization, for fixtures and CSV dumps.
  std::vector<double> dense_row(std::size_t r) const {
    std::vector<double> out(static_cast<std::size_t>(num_vars), 0.0);
    out[static_cast<std::size_t>(rows[r].neg)] = -1.0;
    if (rows[r].pos >= 0) out[static_cast<std::size_t>(rows[r].pos)] = 1.0;
    return out;
  }
};

struct EqualitySystem {
  int num_vars = 0;
  std::vector<std::vector<double>> A;  // k rows, each 2^k - 1 entries
  std::vector<double> b;
  std::vector<Real> b_exact;           // same right-hand side, extended precision
};

// The assembled minimization problem: min (1,0,...,0) . x subject to
// A_ub x <= b_ub and A_eq x = b_eq.
struct LinearProgram {
  std::vector<double> objective;  // (1, 0, ..., 0), length 2^k - 1
  InequalitySystem ub;
  EqualitySystem eq;
};

// Inequality family over the subset lattice; depends only on k.
//   (i)   x_0 >= x_h for the k singleton classes,
//   (ii)  x_g >= x_j for every covering pair S_g subset S_j with
//         |S_j| = |S_g| + 1 and 1 <= |S_g| <= k-2,
//   (iii) x_j >= 1 for the k classes of size k-1.
inline InequalitySystem build_inequalities(const SubsetIndex& index) {
  const int k = index.attribute_count();
  if (k < 2)
    throw std::invalid_argument("build_inequalities: k must be >= 2 "
                                "(single-attribute mechanisms have no inequality family)");
  InequalitySystem sys;
  sys.num_vars = static_cast<int>(index.class_count()) - 1;
  const std::size_t num_rows = static_cast<std::size_t>(k) << (k - 1);
  sys.rows.reserve(num_rows);

  for (int h = 1; h <= k; ++h) sys.rows.push_back(UbRow{0, h});

  for (int h = 1; h <= k - 2; ++h) {
    const std::size_t lo = index.block_start(h);
    const std::size_t hi = index.block_start(h + 1);
    for (std::size_t g = lo; g < lo + index.block_size(h); ++g) {
      const std::uint32_t gm = index.mask_of(g);
      for (std::size_t j = hi; j < hi + index.block_size(h + 1); ++j) {
        if ((gm & index.mask_of(j)) == gm)
          sys.rows.push_back(UbRow{static_cast<int>(g), static_cast<int>(j)});
      }
    }
  }

  const std::size_t tail = index.block_start(k - 1);
  for (int h = 0; h < k; ++h)
    sys.rows.push_back(UbRow{static_cast<int>(tail + static_cast<std::size_t>(h)), -1});

  if (sys.rows.size() != num_rows)
    throw std::logic_error("build_inequalities: row count mismatch");

  sys.b.assign(num_rows, 0.0);
  for (int h = 0; h < k; ++h) sys.b[num_rows - 1 - static_cast<std::size_t>(h)] = -1.0;
  return sys;
}

// Per-attribute level equalities. Row i carries coefficient 1 on x_0, t_j on
// x_j when attribute i is outside S_j, and -e^{eps_i} t_j / (a_i - 1) when it
// is inside; the right-hand side is e^{eps_i} prod_j (a_j - 1) / (a_i - 1).
inline EqualitySystem build_equalities(const SubsetIndex& index, const AttributeSchema& schema,
                                       const PrivacyBudget& budget) {
  budget.check_matches(schema);
  if (!(schema == index.schema()))
    throw std::invalid_argument("build_equalities: index does not match schema");
  const int k = schema.attribute_count();
  const std::size_t n = index.class_count() - 1;

  EqualitySystem sys;
  sys.num_vars = static_cast<int>(n);
  sys.A.assign(static_cast<std::size_t>(k), std::vector<double>(n, 0.0));
  sys.b.resize(static_cast<std::size_t>(k));
  sys.b_exact.resize(static_cast<std::size_t>(k));

  Real prod_am1 = 1;
  for (int i = 0; i < k; ++i) prod_am1 *= schema.domain_size(i) - 1;

  for (int i = 0; i < k; ++i) {
    const Real ei = exp(Real(budget.level(i)));
    const Real am1 = schema.domain_size(i) - 1;
    sys.A[i][0] = 1.0;
    for (std::size_t c = 1; c < n; ++c) {
      const Real& t = index.multiplicity(c);
      Real coeff = (index.mask_of(c) >> i & 1u) ? Real(-ei * t / am1) : t;
      sys.A[i][c] = to_double(coeff);
      if (!std::isfinite(sys.A[i][c]))
        throw std::invalid_argument("build_equalities: coefficient overflows double "
                                    "(eps too large for the LP path)");
    }
    sys.b_exact[i] = ei * prod_am1 / am1;
    sys.b[i] = to_double(sys.b_exact[i]);
    if (!std::isfinite(sys.b[i]))
      throw std::invalid_argument("build_equalities: right-hand side overflows double "
                                  "(eps too large for the LP path)");
  }
  return sys;
}

inline LinearProgram assemble_lp(const SubsetIndex& index, const AttributeSchema& schema,
                                 const PrivacyBudget& budget) {
  LinearProgram lp;
  lp.ub = build_inequalities(index);
  lp.eq = build_equalities(index, schema, budget);
  lp.objective.assign(static_cast<std::size_t>(lp.ub.num_vars), 0.0);
  lp.objective[0] = 1.0;
  return lp;
}

// CSV dump of the assembled system, for cross-checking with external tools.
inline void dump_lp_csv(const LinearProgram& lp, std::ostream& a_ub, std::ostream& b_ub,
                        std::ostream& a_eq, std::ostream& b_eq) {
  auto write_row = [](std::ostream& os, const std::vector<double>& row) {
    char buf[64];
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  };
  for (std::size_t r = 0; r < lp.ub.rows.size(); ++r) write_row(a_ub, lp.ub.dense_row(r));
  write_row(b_ub, lp.ub.b);
  for (const auto& row : lp.eq.A) write_row(a_eq, row);
  write_row(b_eq, lp.eq.b);
}

}  // namespace optrr
