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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "optrr/distortion_spec.hpp"
#include "optrr/linear_program.hpp"
#include "optrr/real.hpp"
#include "optrr/simplex.hpp"
#include "optrr/subset_index.hpp"
#include "optrr/types.hpp"

namespace optrr {

struct LpOptions {
  int k_cap = 12;              // exact solves beyond this are rejected
  double time_limit_sec = 0;   // 0 = none
  double eq_rel_tol = 1e-8;    // relative equality residual accepted
  double ub_abs_tol = 1e-9;    // inequality slack tolerance accepted
  // Per-attribute level beyond which the solve runs in extended precision
  // (coefficient spans of e^{eps} exhaust double's cancellation headroom).
  double extended_eps_threshold = 25.0;
};

struct LpSolveInfo {
  double objective = 0;
  std::uint64_t iterations = 0;
  double seconds = 0;
  double max_eq_rel_residual = 0;
  double max_ub_violation = 0;
  int tie_classes = 0;
  bool extended_precision = false;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LpInfeasibleError : public LpError {
 public:
  LpInfeasibleError(const std::string& msg, std::vector<std::string> rows)
      : LpError(msg), violated_rows(std::move(rows)) {}
  std::vector<std::string> violated_rows;
};

class LpTimeoutError : public LpError {
 public:
  using LpError::LpError;
};

class LpNonConvergenceError : public LpError {
 public:
  using LpError::LpError;
};

namespace detail {

inline double pow2_round(double s) {
  if (!(s > 0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  // Returns false when already joined (a dependent tie, basis anomaly).
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Dense square solve by Gauss-Jordan with partial pivoting, followed by
// iterative refinement with extended-precision residuals. Returns false on a
// (numerically) singular system.
template <class Scalar>
bool solve_square_refined(const std::vector<std::vector<Scalar>>& rows,
                          const std::vector<Scalar>& rhs, std::vector<Scalar>& out) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) {
    out.clear();
    return true;
  }
  // Factor once into an explicit inverse (sizes here are modest).
  std::vector<std::vector<Scalar>> a = rows;
  std::vector<std::vector<Scalar>> inv(static_cast<std::size_t>(n),
                                       std::vector<Scalar>(static_cast<std::size_t>(n), Scalar(0)));
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Scalar(1);
  auto sabs = [](const Scalar& v) { return v < 0 ? Scalar(-v) : v; };

  for (int c = 0; c < n; ++c) {
    int piv = -1;
    Scalar mag = 0;
    for (int r = c; r < n; ++r) {
      const Scalar m = sabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
      if (m > mag) {
        mag = m;
        piv = r;
      }
    }
    if (piv < 0 || mag == 0) return false;
    std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(piv)]);
    std::swap(inv[static_cast<std::size_t>(c)], inv[static_cast<std::size_t>(piv)]);
    const Scalar inv_piv = Scalar(1) / a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const Scalar f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * inv_piv;
      if (f == 0) continue;
      for (int cc = c; cc < n; ++cc)
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
      for (int cc = 0; cc < n; ++cc)
        inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -=
            f * inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)];
    }
    for (int cc = c; cc < n; ++cc) a[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)] *= inv_piv;
    for (int cc = 0; cc < n; ++cc) inv[static_cast<std::size_t>(c)][static_cast<std::size_t>(cc)] *= inv_piv;
  }

  auto apply_inverse = [&](const std::vector<Scalar>& v) {
    std::vector<Scalar> res(static_cast<std::size_t>(n), Scalar(0));
    for (int r = 0; r < n; ++r) {
      Scalar acc = 0;
      for (int c = 0; c < n; ++c)
        acc += inv[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * v[static_cast<std::size_t>(c)];
      res[static_cast<std::size_t>(r)] = acc;
    }
    return res;
  };

  out = apply_inverse(rhs);
  for (int pass = 0; pass < 3; ++pass) {
    std::vector<Scalar> resid(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      Real acc = Real(rhs[static_cast<std::size_t>(r)]);
      for (int c = 0; c < n; ++c)
        acc -= Real(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) *
               Real(out[static_cast<std::size_t>(c)]);
      resid[static_cast<std::size_t>(r)] = static_cast<Scalar>(acc);
    }
    const std::vector<Scalar> delta = apply_inverse(resid);
    for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(c)] += delta[static_cast<std::size_t>(c)];
  }
  return true;
}

// Exact vertex recovery from the optimal basis. Tight chain rows in the
// basis become tie classes (members share one value bit-for-bit); classes
// pinned by an "x >= 1" row are exactly 1; the remaining class
// representatives solve the reduced equality system. Falls back to the raw
// duals on any structural anomaly; the caller verifies either way.
template <class Scalar>
bool recover_vertex(const LinearProgram& lp, const std::vector<int>& basis, int n_ub, int m,
                    std::vector<Scalar>& x, int& tie_class_count) {
  UnionFind uf(m);
  std::vector<std::pair<int, Scalar>> pins;
  std::vector<int> eq_rows;
  const int n_struct = n_ub + 2 * static_cast<int>(lp.eq.A.size());
  for (const int col : basis) {
    if (col >= n_struct) return false;  // basic slack at claimed optimum
    if (col < n_ub) {
      const UbRow& row = lp.ub.rows[static_cast<std::size_t>(col)];
      if (row.pos >= 0) {
        if (!uf.join(row.neg, row.pos)) return false;
      } else {
        pins.push_back({row.neg, Scalar(1)});
      }
    } else {
      eq_rows.push_back((col - n_ub) / 2);
    }
  }
  std::sort(eq_rows.begin(), eq_rows.end());
  if (std::adjacent_find(eq_rows.begin(), eq_rows.end()) != eq_rows.end()) return false;

  std::vector<int> class_id(static_cast<std::size_t>(m), -1);
  int num_classes = 0;
  for (int j = 0; j < m; ++j) {
    const int root = uf.find(j);
    if (class_id[static_cast<std::size_t>(root)] < 0) class_id[static_cast<std::size_t>(root)] = num_classes++;
    class_id[static_cast<std::size_t>(j)] = class_id[static_cast<std::size_t>(root)];
  }
  std::vector<char> pinned(static_cast<std::size_t>(num_classes), 0);
  std::vector<Scalar> pin_value(static_cast<std::size_t>(num_classes), Scalar(0));
  for (const auto& [var, val] : pins) {
    const int c = class_id[static_cast<std::size_t>(var)];
    if (pinned[static_cast<std::size_t>(c)]) return false;
    pinned[static_cast<std::size_t>(c)] = 1;
    pin_value[static_cast<std::size_t>(c)] = val;
  }
  std::vector<int> free_id(static_cast<std::size_t>(num_classes), -1);
  int num_free = 0;
  for (int c = 0; c < num_classes; ++c)
    if (!pinned[static_cast<std::size_t>(c)]) free_id[static_cast<std::size_t>(c)] = num_free++;
  if (num_free != static_cast<int>(eq_rows.size())) return false;

  std::vector<std::vector<Scalar>> rows(static_cast<std::size_t>(num_free),
                                        std::vector<Scalar>(static_cast<std::size_t>(num_free), Scalar(0)));
  std::vector<Scalar> rhs(static_cast<std::size_t>(num_free), Scalar(0));
  for (std::size_t e = 0; e < eq_rows.size(); ++e) {
    const int l = eq_rows[e];
    std::vector<Real> acc(static_cast<std::size_t>(num_classes), Real(0));
    for (int j = 0; j < m; ++j)
      acc[static_cast<std::size_t>(class_id[static_cast<std::size_t>(j)])] +=
          Real(lp.eq.A[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)]);
    Real b = Real(lp.eq.b[static_cast<std::size_t>(l)]);
    for (int c = 0; c < num_classes; ++c) {
      if (pinned[static_cast<std::size_t>(c)])
        b -= acc[static_cast<std::size_t>(c)] * Real(pin_value[static_cast<std::size_t>(c)]);
      else
        rows[e][static_cast<std::size_t>(free_id[static_cast<std::size_t>(c)])] =
            static_cast<Scalar>(acc[static_cast<std::size_t>(c)]);
    }
    rhs[e] = static_cast<Scalar>(b);
  }
  std::vector<Scalar> y;
  if (!solve_square_refined(rows, rhs, y)) return false;
  for (int j = 0; j < m; ++j) {
    const int c = class_id[static_cast<std::size_t>(j)];
    x[static_cast<std::size_t>(j)] = pinned[static_cast<std::size_t>(c)]
                                         ? pin_value[static_cast<std::size_t>(c)]
                                         : y[static_cast<std::size_t>(free_id[static_cast<std::size_t>(c)])];
  }
  tie_class_count = num_classes;
  return true;
}

template <class Scalar>
std::vector<Real> solve_lp_scalar(const LinearProgram& lp, int k, const LpOptions& opt,
                                  LpSolveInfo* info) {
  const int m = lp.ub.num_vars;  // primal variables = dual rows
  const int n_ub = static_cast<int>(lp.ub.rows.size());
  const int n_struct = n_ub + 2 * k;

  // Dual columns: one per inequality row (u, objective -b_ub) and a +/- pair
  // per equality row (free multiplier split, objective +/- b_eq).
  SimplexProblemT<Scalar> dual;
  dual.rows = m;
  dual.cols.resize(static_cast<std::size_t>(n_struct));
  dual.obj.resize(static_cast<std::size_t>(n_struct));
  dual.rhs.assign(static_cast<std::size_t>(m), Scalar(0));
  dual.rhs[0] = Scalar(1);

  for (int r = 0; r < n_ub; ++r) {
    auto& col = dual.cols[static_cast<std::size_t>(r)];
    col.entries.push_back({lp.ub.rows[static_cast<std::size_t>(r)].neg, Scalar(1)});
    if (lp.ub.rows[static_cast<std::size_t>(r)].pos >= 0)
      col.entries.push_back({lp.ub.rows[static_cast<std::size_t>(r)].pos, Scalar(-1)});
    dual.obj[static_cast<std::size_t>(r)] = Scalar(-lp.ub.b[static_cast<std::size_t>(r)]);
  }
  for (int l = 0; l < k; ++l) {
    for (int sign = 0; sign < 2; ++sign) {
      const Scalar sgn = sign == 0 ? Scalar(1) : Scalar(-1);
      auto& col = dual.cols[static_cast<std::size_t>(n_ub + 2 * l + sign)];
      col.entries.reserve(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j)
        col.entries.push_back(
            {j, sgn * Scalar(lp.eq.A[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)])});
      dual.obj[static_cast<std::size_t>(n_ub + 2 * l + sign)] =
          sgn * Scalar(lp.eq.b[static_cast<std::size_t>(l)]);
    }
  }

  // Equilibration with power-of-two factors: columns, rows, columns.
  auto sabs = [](const Scalar& v) { return v < 0 ? Scalar(-v) : v; };
  std::vector<double> row_scale(static_cast<std::size_t>(m), 1.0);
  for (int round = 0; round < 2; ++round) {
    for (std::size_t cidx = 0; cidx < dual.cols.size(); ++cidx) {
      auto& col = dual.cols[cidx];
      Scalar mx = 0;
      for (auto& [r, v] : col.entries) mx = std::max(mx, sabs(v));
      const double s = pow2_round(static_cast<double>(mx));
      if (s != 1.0) {
        const Scalar sv(s);
        for (auto& [r, v] : col.entries) v /= sv;
        dual.obj[cidx] /= sv;
      }
    }
    if (round == 1) break;
    std::vector<Scalar> row_max(static_cast<std::size_t>(m), Scalar(0));
    for (auto& col : dual.cols)
      for (auto& [r, v] : col.entries)
        row_max[static_cast<std::size_t>(r)] = std::max(row_max[static_cast<std::size_t>(r)], sabs(v));
    for (int r = 0; r < m; ++r) {
      const double s = pow2_round(static_cast<double>(row_max[static_cast<std::size_t>(r)]));
      if (s != 1.0) {
        row_scale[static_cast<std::size_t>(r)] /= s;
        dual.rhs[static_cast<std::size_t>(r)] /= Scalar(s);
      }
    }
    for (auto& col : dual.cols)
      for (auto& [r, v] : col.entries) v *= Scalar(row_scale[static_cast<std::size_t>(r)]);
  }

  // Retry with a tighter refactorization cadence if the inverse drifts.
  SimplexResultT<Scalar> res;
  {
    SimplexOptions sopt;
    sopt.time_limit_sec = opt.time_limit_sec;
    bool solved = false;
    for (const int refactor_every : {250, 48, 8}) {
      sopt.refactor_every = refactor_every;
      try {
        res = DenseSimplexT<Scalar>(dual, sopt).solve();
        solved = true;
        break;
      } catch (const SimplexFeasibilityLost&) {
        continue;
      }
    }
    if (!solved)
      throw LpNonConvergenceError(
          "solve_optimal: simplex kept losing feasibility despite refactorization");
  }

  auto describe_col = [&](int col) -> std::string {
    if (col < n_ub) {
      const UbRow& row = lp.ub.rows[static_cast<std::size_t>(col)];
      if (row.pos >= 0)
        return "inequality row " + std::to_string(col) + " (x" + std::to_string(row.neg) +
               " >= x" + std::to_string(row.pos) + ")";
      return "inequality row " + std::to_string(col) + " (x" + std::to_string(row.neg) + " >= 1)";
    }
    return "equality row " + std::to_string((col - n_ub) / 2) + " (attribute level)";
  };

  if (res.status == SimplexStatus::TimeLimit)
    throw LpTimeoutError("solve_optimal: time limit exceeded after " +
                         std::to_string(res.iterations) + " iterations");
  if (res.status == SimplexStatus::IterationLimit)
    throw LpNonConvergenceError("solve_optimal: iteration limit reached");
  if (res.status == SimplexStatus::Unbounded) {
    std::vector<std::string> rows;
    if (res.unbounded_col >= 0) rows.push_back(describe_col(res.unbounded_col));
    for (int c : res.ray_cols) rows.push_back(describe_col(c));
    throw LpInfeasibleError(
        "solve_optimal: the level equalities and chain inequalities are "
        "inconsistent (no feasible distortion values)",
        std::move(rows));
  }

  // Raw primal point from the duals of the scaled problem, then the exact
  // vertex from the basis.
  std::vector<Scalar> x(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    x[static_cast<std::size_t>(j)] =
        res.duals[static_cast<std::size_t>(j)] * Scalar(row_scale[static_cast<std::size_t>(j)]);
  int tie_classes = 0;
  recover_vertex(lp, res.basis, n_ub, m, x, tie_classes);

  if (info) {
    info->iterations = res.iterations;
    info->tie_classes = tie_classes;
  }
  std::vector<Real> out(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(j)] = Real(x[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace detail

// Solves the assembled linear program exactly: min x_0 subject to the chain
// inequalities and the k per-attribute level equalities. Internally the dual
// is solved (2^k - 1 rows instead of k 2^{k-1} rows), and the primal vertex
// is recovered from the optimal basis, with tight chain constraints
// collapsed into tie classes so tied values come out bit-identical. The
// result is verified against the full constraint system in extended
// precision before it is returned.
inline DistortionSpec solve_optimal(const AttributeSchema& schema, const PrivacyBudget& budget,
                                    const LpOptions& opt = {}, LpSolveInfo* info_out = nullptr) {
  budget.check_matches(schema);
  const int k = schema.attribute_count();
  if (k > opt.k_cap) {
    throw std::invalid_argument("solve_optimal: k = " + std::to_string(k) +
                                " exceeds the exact-solve cap of " + std::to_string(opt.k_cap));
  }

  const auto t_start = std::chrono::steady_clock::now();
  LpSolveInfo info;

  DistortionSpec spec{schema};
  spec.kind = SpecKind::FullClasses;
  spec.method = Method::OptimalLp;
  spec.achieved_eps = budget.levels();

  if (k == 1) {
    // Single attribute: the level equality alone forces x_0 = e^{eps_1}.
    spec.x = {exp(Real(budget.level(0))), Real(1)};
    info.objective = to_double(spec.x[0]);
    if (info_out) *info_out = info;
    return spec;
  }

  const SubsetIndex index = build_index(schema);
  const LinearProgram lp = assemble_lp(index, schema, budget);
  const int m = lp.ub.num_vars;

  double max_eps = 0;
  for (double e : budget.levels()) max_eps = std::max(max_eps, e);
  info.extended_precision = max_eps > opt.extended_eps_threshold;

  const std::vector<Real> x = info.extended_precision
                                  ? detail::solve_lp_scalar<Real>(lp, k, opt, &info)
                                  : detail::solve_lp_scalar<double>(lp, k, opt, &info);

  // --- Verify the vertex against the full system in extended precision. ----
  double max_eq_rel = 0;
  for (int l = 0; l < k; ++l) {
    Real acc = 0;
    for (int j = 0; j < m; ++j)
      acc += Real(lp.eq.A[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)]) *
             x[static_cast<std::size_t>(j)];
    const Real denom = (std::max)(Real(std::abs(lp.eq.b[static_cast<std::size_t>(l)])), Real(1));
    max_eq_rel = std::max(
        max_eq_rel, to_double(abs(acc - Real(lp.eq.b[static_cast<std::size_t>(l)])) / denom));
  }
  double max_ub_viol = 0;
  for (std::size_t r = 0; r < lp.ub.rows.size(); ++r) {
    const UbRow& row = lp.ub.rows[r];
    Real lhs = -x[static_cast<std::size_t>(row.neg)];
    if (row.pos >= 0) lhs += x[static_cast<std::size_t>(row.pos)];
    max_ub_viol = std::max(max_ub_viol, to_double(lhs - Real(lp.ub.b[r])));
  }

  info.objective = to_double(x[0]);
  info.max_eq_rel_residual = max_eq_rel;
  info.max_ub_violation = max_ub_viol;
  info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (info_out) *info_out = info;

  if (max_eq_rel > opt.eq_rel_tol || max_ub_viol > opt.ub_abs_tol) {
    throw LpNonConvergenceError(
        "solve_optimal: solution failed verification (eq residual " + std::to_string(max_eq_rel) +
        ", inequality violation " + std::to_string(max_ub_viol) + ")");
  }

  spec.x.resize(index.class_count());
  for (int j = 0; j < m; ++j) spec.x[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
  spec.x.back() = 1;
  validate_spec(spec, 1e-9);
  return spec;
}

}  // namespace optrr
