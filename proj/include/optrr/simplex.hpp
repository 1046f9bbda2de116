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
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace optrr {

// Sparse column of the constraint matrix: (row, value) pairs.
template <class Scalar>
struct SimplexColumnT {
  std::vector<std::pair<int, Scalar>> entries;
};

// Problem in the shape
//     maximize  obj . w   subject to   sum_j w_j col_j <= rhs,  w >= 0,
// with rhs >= 0, so the all-slack basis is feasible and a single phase
// suffices. Row multipliers (duals) are reported alongside the solution.
template <class Scalar>
struct SimplexProblemT {
  int rows = 0;
  std::vector<SimplexColumnT<Scalar>> cols;
  std::vector<Scalar> obj;
  std::vector<Scalar> rhs;
};

enum class SimplexStatus { Optimal, Unbounded, IterationLimit, TimeLimit };

// Basis inverse drifted far enough that the refreshed basic solution went
// negative; callers may retry with a tighter refactorization interval.
class SimplexFeasibilityLost : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Scalar>
struct SimplexResultT {
  SimplexStatus status = SimplexStatus::IterationLimit;
  Scalar objective = Scalar(0);
  std::vector<Scalar> w;       // structural variable values
  std::vector<Scalar> duals;   // row multipliers at the final basis
  std::vector<int> basis;      // per row: basic column (>= n means slack of row id - n)
  std::uint64_t iterations = 0;
  int unbounded_col = -1;      // entering column witnessing unboundedness
  std::vector<int> ray_cols;   // basic structural columns moving along the ray
};

struct SimplexOptions {
  double rc_tol = 1e-9;       // reduced-cost tolerance, scaled by the envelope
  double pivot_tol = 1e-7;    // pivot candidacy relative to the column maximum
  double ratio_tie_tol = 1e-9;
  int refactor_every = 500;
  std::uint64_t max_iterations = 0;  // 0 = derived from size
  double time_limit_sec = 0;         // 0 = none
};

// Revised simplex with an explicitly maintained basis inverse and a
// lexicographic ratio test for anti-cycling (the all-slack start makes the
// initial [xb | Binv] rows lex-positive). The inverse is refactorized from
// scratch periodically and before declaring optimality. All tolerances are
// relative to the magnitude envelope of the quantity being tested, because
// the target problems mix coefficients of order 1 and order e^{eps}.
//
// The scalar type is a template parameter: double covers ordinary budgets;
// an extended-precision scalar extends the usable coefficient span when the
// levels push products past double's cancellation headroom.
template <class Scalar>
class DenseSimplexT {
 public:
  using Options = SimplexOptions;
  using Problem = SimplexProblemT<Scalar>;
  using Result = SimplexResultT<Scalar>;

  DenseSimplexT(Problem problem, Options opt = Options())
      : p_(std::move(problem)), opt_(opt), m_(p_.rows), n_(static_cast<int>(p_.cols.size())) {
    if (static_cast<int>(p_.obj.size()) != n_ || static_cast<int>(p_.rhs.size()) != m_)
      throw std::invalid_argument("simplex: inconsistent problem dimensions");
    for (const Scalar& b : p_.rhs)
      if (b < 0) throw std::invalid_argument("simplex: rhs must be non-negative");
  }

  Result solve() {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t max_iter =
        opt_.max_iterations ? opt_.max_iterations
                            : 200000ULL + 64ULL * static_cast<std::uint64_t>(m_ + n_);

    basis_.resize(static_cast<std::size_t>(m_));
    in_basis_.assign(static_cast<std::size_t>(n_) + static_cast<std::size_t>(m_), 0);
    for (int r = 0; r < m_; ++r) {
      basis_[static_cast<std::size_t>(r)] = n_ + r;
      in_basis_[static_cast<std::size_t>(n_ + r)] = 1;
    }
    // Column-major m x m identity.
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), Scalar(0));
    for (int r = 0; r < m_; ++r) binv_col(r)[r] = Scalar(1);
    rhs_support_.clear();
    for (int r = 0; r < m_; ++r)
      if (p_.rhs[static_cast<std::size_t>(r)] != 0) rhs_support_.push_back(r);
    xb_.assign(static_cast<std::size_t>(m_), Scalar(0));
    refresh_basic_values(false);
    pi_.assign(static_cast<std::size_t>(m_), Scalar(0));
    d_.assign(static_cast<std::size_t>(m_), Scalar(0));

    Result res;
    int confirm_rounds = 0;
    std::uint64_t since_refactor = 0;

    while (true) {
      if (opt_.time_limit_sec > 0 && (res.iterations & 15u) == 0) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > opt_.time_limit_sec) {
          res.status = SimplexStatus::TimeLimit;
          return finish(std::move(res));
        }
      }
      if (res.iterations > max_iter) {
        res.status = SimplexStatus::IterationLimit;
        return finish(std::move(res));
      }

      compute_duals();
      const int q = choose_entering();
      if (q < 0) {
        // Re-check against a freshly factorized basis before accepting.
        if (confirm_rounds++ < 3 && since_refactor > 0) {
          refactorize();
          since_refactor = 0;
          continue;
        }
        res.status = SimplexStatus::Optimal;
        return finish(std::move(res));
      }
      confirm_rounds = 0;

      ftran(q);
      const int r = choose_leaving();
      if (r < 0) {
        res.status = SimplexStatus::Unbounded;
        res.unbounded_col = q;
        for (int i = 0; i < m_; ++i)
          if (d_[static_cast<std::size_t>(i)] < 0 && basis_[static_cast<std::size_t>(i)] < n_)
            res.ray_cols.push_back(basis_[static_cast<std::size_t>(i)]);
        return finish(std::move(res));
      }

      pivot(q, r);
      ++res.iterations;
      if (static_cast<int>(++since_refactor) >= opt_.refactor_every) {
        refactorize();
        since_refactor = 0;
      }
    }
  }

 private:
  static Scalar sabs(const Scalar& v) { return v < 0 ? Scalar(-v) : v; }

  Scalar* binv_col(int c) { return binv_.data() + static_cast<std::size_t>(c) * m_; }
  const Scalar* binv_col(int c) const { return binv_.data() + static_cast<std::size_t>(c) * m_; }

  Scalar objective_coeff(int col) const {
    return col < n_ ? p_.obj[static_cast<std::size_t>(col)] : Scalar(0);
  }

  void compute_duals() {
    for (int c = 0; c < m_; ++c) {
      Scalar acc = 0;
      const Scalar* col = binv_col(c);
      for (int r = 0; r < m_; ++r) {
        const Scalar cb = objective_coeff(basis_[static_cast<std::size_t>(r)]);
        if (cb != 0) acc += cb * col[r];
      }
      pi_[static_cast<std::size_t>(c)] = acc;
    }
  }

  // Reduced cost together with the magnitude envelope of its computation.
  std::pair<Scalar, Scalar> reduced_cost(int col) const {
    if (col >= n_) {
      const Scalar pi = pi_[static_cast<std::size_t>(col - n_)];
      return {-pi, sabs(pi)};
    }
    Scalar rc = p_.obj[static_cast<std::size_t>(col)];
    Scalar scale = sabs(rc);
    for (const auto& [r, val] : p_.cols[static_cast<std::size_t>(col)].entries) {
      const Scalar term = val * pi_[static_cast<std::size_t>(r)];
      rc -= term;
      scale += sabs(term);
    }
    return {rc, scale};
  }

  int choose_entering() const {
    int best = -1;
    Scalar best_key = 0;
    const Scalar one(1);
    for (int j = 0; j < n_ + m_; ++j) {
      if (in_basis_[static_cast<std::size_t>(j)]) continue;
      const auto [rc, scale] = reduced_cost(j);
      const Scalar bar = scale < one ? one : scale;
      if (rc <= Scalar(opt_.rc_tol) * bar) continue;
      const Scalar key = rc / bar;  // scale-free Dantzig
      if (best < 0 || key > best_key) {
        best_key = key;
        best = j;
      }
    }
    return best;
  }

  void ftran(int col) {
    std::fill(d_.begin(), d_.end(), Scalar(0));
    if (col >= n_) {
      const Scalar* src = binv_col(col - n_);
      std::copy(src, src + m_, d_.begin());
      return;
    }
    for (const auto& [r, val] : p_.cols[static_cast<std::size_t>(col)].entries) {
      const Scalar* src = binv_col(r);
      for (int i = 0; i < m_; ++i) d_[static_cast<std::size_t>(i)] += val * src[i];
    }
  }

  // Lexicographic ratio test: min xb_r/d_r over candidates with d_r above a
  // relative cutoff; ties resolved by the rows of Binv scaled by 1/d_r.
  int choose_leaving() const {
    Scalar dmax = 0;
    for (int r = 0; r < m_; ++r) dmax = std::max(dmax, d_[static_cast<std::size_t>(r)]);
    if (!(dmax > Scalar(1e-280))) return -1;
    const Scalar cutoff = Scalar(opt_.pivot_tol) * dmax;

    std::vector<int> cand;
    Scalar tmin = 0;
    const Scalar one(1);
    for (int r = 0; r < m_; ++r) {
      const Scalar dr = d_[static_cast<std::size_t>(r)];
      if (!(dr > cutoff)) continue;
      Scalar num = xb_[static_cast<std::size_t>(r)];
      if (num < 0) num = 0;
      const Scalar t = num / dr;
      const Scalar slack = Scalar(opt_.ratio_tie_tol) * (one + sabs(tmin));
      if (cand.empty() || t < tmin - slack) {
        cand.assign(1, r);
        tmin = t;
      } else if (t <= tmin + slack) {
        cand.push_back(r);
        if (t < tmin) tmin = t;
      }
    }
    if (cand.empty()) return -1;
    for (int c = 0; c < m_ && cand.size() > 1; ++c) {
      Scalar vmin = 0;
      std::vector<int> keep;
      const Scalar* col = binv_col(c);
      for (const int r : cand) {
        const Scalar v = col[r] / d_[static_cast<std::size_t>(r)];
        const Scalar slack = Scalar(1e-12) * (one + sabs(vmin));
        if (keep.empty() || v < vmin - slack) {
          keep.assign(1, r);
          vmin = v;
        } else if (v <= vmin + slack) {
          keep.push_back(r);
          if (v < vmin) vmin = v;
        }
      }
      cand.swap(keep);
    }
    // Any remaining tie is broken by the smallest basic column id.
    int best = cand[0];
    for (const int r : cand)
      if (basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(best)]) best = r;
    return best;
  }

  void pivot(int q, int r) {
    const Scalar piv = d_[static_cast<std::size_t>(r)];

    // Column-wise rank-1 update of the inverse; the basic values are then
    // refreshed from the inverse so they can never drift apart from it.
    for (int c = 0; c < m_; ++c) {
      Scalar* col = binv_col(c);
      const Scalar pivot_val = col[r] / piv;
      if (pivot_val == 0) {
        col[r] = pivot_val;
        continue;
      }
      for (int i = 0; i < m_; ++i) col[i] -= d_[static_cast<std::size_t>(i)] * pivot_val;
      col[r] = pivot_val;
    }

    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    in_basis_[static_cast<std::size_t>(q)] = 1;
    basis_[static_cast<std::size_t>(r)] = q;
    refresh_basic_values(false);
  }

  // xb = Binv rhs, exploiting the rhs support (a single nonzero for the
  // distortion LPs). Negative roundoff is clamped; `strict` escalates a
  // material violation, which signals that the inverse has drifted.
  void refresh_basic_values(bool strict) {
    std::fill(xb_.begin(), xb_.end(), Scalar(0));
    for (const int r : rhs_support_) {
      const Scalar b = p_.rhs[static_cast<std::size_t>(r)];
      const Scalar* col = binv_col(r);
      for (int i = 0; i < m_; ++i) xb_[static_cast<std::size_t>(i)] += col[i] * b;
    }
    Scalar scale = 1;
    for (int i = 0; i < m_; ++i) scale = std::max(scale, sabs(xb_[static_cast<std::size_t>(i)]));
    const Scalar floor = Scalar(-1e-6) * scale;
    for (int i = 0; i < m_; ++i) {
      Scalar& v = xb_[static_cast<std::size_t>(i)];
      if (v < 0) {
        if (strict && v < floor)
          throw SimplexFeasibilityLost("simplex: basis lost primal feasibility");
        v = 0;
      }
    }
  }

  // Rebuild the inverse from scratch by Gauss-Jordan with partial pivoting.
  void refactorize() {
    std::vector<Scalar> B(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), Scalar(0));
    auto bcol = [&](int c) { return B.data() + static_cast<std::size_t>(c) * m_; };
    for (int r = 0; r < m_; ++r) {
      const int col = basis_[static_cast<std::size_t>(r)];
      if (col >= n_) {
        bcol(r)[col - n_] = Scalar(1);
      } else {
        for (const auto& [row, val] : p_.cols[static_cast<std::size_t>(col)].entries)
          bcol(r)[row] = val;
      }
    }
    std::vector<Scalar> inv(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), Scalar(0));
    auto icol = [&](int c) { return inv.data() + static_cast<std::size_t>(c) * m_; };
    for (int r = 0; r < m_; ++r) icol(r)[r] = Scalar(1);

    std::vector<int> perm(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) perm[static_cast<std::size_t>(i)] = i;
    // Row-reduce B to the identity, mirroring the operations onto inv. Work
    // on logical rows through the permutation.
    for (int c = 0; c < m_; ++c) {
      int piv_row = -1;
      Scalar piv_mag = 0;
      Scalar* col = bcol(c);
      for (int r = c; r < m_; ++r) {
        const Scalar mag = sabs(col[perm[static_cast<std::size_t>(r)]]);
        if (mag > piv_mag) {
          piv_mag = mag;
          piv_row = r;
        }
      }
      if (piv_row < 0 || piv_mag == 0)
        throw SimplexFeasibilityLost("simplex: basis matrix is singular on refactorization");
      std::swap(perm[static_cast<std::size_t>(c)], perm[static_cast<std::size_t>(piv_row)]);
      const int prow = perm[static_cast<std::size_t>(c)];
      const Scalar inv_piv = Scalar(1) / col[prow];
      // Eliminate the pivot column from all other rows.
      for (int rr = 0; rr < m_; ++rr) {
        const int row = (rr == c) ? prow : perm[static_cast<std::size_t>(rr)];
        if (row == prow) continue;
        const Scalar f = col[row] * inv_piv;
        if (f == 0) continue;
        for (int cc = c; cc < m_; ++cc) {
          Scalar* bc = bcol(cc);
          bc[row] -= f * bc[prow];
        }
        for (int cc = 0; cc < m_; ++cc) {
          Scalar* ic = icol(cc);
          ic[row] -= f * ic[prow];
        }
      }
      for (int cc = c; cc < m_; ++cc) bcol(cc)[prow] *= inv_piv;
      for (int cc = 0; cc < m_; ++cc) icol(cc)[prow] *= inv_piv;
    }
    // Undo the row permutation: inverse rows follow the pivot order.
    binv_.assign(inv.size(), Scalar(0));
    for (int c = 0; c < m_; ++c) {
      Scalar* dst = binv_col(c);
      const Scalar* src = icol(c);
      for (int r = 0; r < m_; ++r) dst[r] = src[perm[static_cast<std::size_t>(r)]];
    }
    refresh_basic_values(true);
  }

  Result finish(Result res) {
    compute_duals();
    res.w.assign(static_cast<std::size_t>(n_), Scalar(0));
    Scalar obj = 0;
    for (int r = 0; r < m_; ++r) {
      const int col = basis_[static_cast<std::size_t>(r)];
      if (col < n_) {
        res.w[static_cast<std::size_t>(col)] = xb_[static_cast<std::size_t>(r)];
        obj += p_.obj[static_cast<std::size_t>(col)] * xb_[static_cast<std::size_t>(r)];
      }
    }
    res.objective = obj;
    res.duals = pi_;
    res.basis = basis_;
    return res;
  }

  Problem p_;
  Options opt_;
  int m_, n_;
  std::vector<int> basis_;
  std::vector<char> in_basis_;
  std::vector<int> rhs_support_;  // rows with nonzero rhs
  std::vector<Scalar> binv_;      // column-major m x m
  std::vector<Scalar> xb_;
  std::vector<Scalar> pi_;
  std::vector<Scalar> d_;
};

using SimplexColumn = SimplexColumnT<double>;
using SimplexProblem = SimplexProblemT<double>;
using SimplexResult = SimplexResultT<double>;
using DenseSimplex = DenseSimplexT<double>;

}  // namespace optrr
