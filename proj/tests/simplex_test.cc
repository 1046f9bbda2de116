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

#include "optrr/simplex.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "optrr/rng.hpp"

namespace optrr {
namespace {

SimplexProblem dense_problem(const std::vector<std::vector<double>>& A,
                             const std::vector<double>& b, const std::vector<double>& c) {
  SimplexProblem p;
  p.rows = static_cast<int>(b.size());
  p.rhs = b;
  p.obj = c;
  p.cols.resize(c.size());
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t i = 0; i < b.size(); ++i)
      if (A[i][j] != 0.0) p.cols[j].entries.push_back({static_cast<int>(i), A[i][j]});
  return p;
}

TEST(DenseSimplex, TextbookMaximum) {
  // max 5x + 4y s.t. 6x + 4y <= 24, x + 2y <= 6; optimum (3, 1.5), value 21,
  // duals (0.75, 0.5).
  const SimplexResult res =
      DenseSimplex(dense_problem({{6, 4}, {1, 2}}, {24, 6}, {5, 4})).solve();
  ASSERT_EQ(res.status, SimplexStatus::Optimal);
  EXPECT_NEAR(res.objective, 21.0, 1e-9);
  EXPECT_NEAR(res.w[0], 3.0, 1e-9);
  EXPECT_NEAR(res.w[1], 1.5, 1e-9);
  EXPECT_NEAR(res.duals[0], 0.75, 1e-9);
  EXPECT_NEAR(res.duals[1], 0.5, 1e-9);
}

TEST(DenseSimplex, DetectsUnbounded) {
  // max x s.t. -x <= 1.
  const SimplexResult res = DenseSimplex(dense_problem({{-1}}, {1}, {1})).solve();
  EXPECT_EQ(res.status, SimplexStatus::Unbounded);
  EXPECT_EQ(res.unbounded_col, 0);
}

TEST(DenseSimplex, HandlesDegenerateVertex) {
  // Three constraints meet at (1, 1); the redundant row must not cycle.
  const SimplexResult res = DenseSimplex(dense_problem({{1, 0}, {0, 1}, {1, 1}}, {1, 1, 2},
                                                       {1, 1}))
                                .solve();
  ASSERT_EQ(res.status, SimplexStatus::Optimal);
  EXPECT_NEAR(res.objective, 2.0, 1e-9);
}

TEST(DenseSimplex, ZeroObjectiveIsOptimalAtOrigin) {
  const SimplexResult res = DenseSimplex(dense_problem({{1, 1}}, {5}, {0, 0})).solve();
  ASSERT_EQ(res.status, SimplexStatus::Optimal);
  EXPECT_EQ(res.objective, 0.0);
}

// Independent oracle: enumerate all candidate vertices (choices of n active
// constraints among rows and non-negativity bounds) and take the best
// feasible one.
double enumerate_optimum(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                         const std::vector<double>& c) {
  const int m = static_cast<int>(b.size());
  const int n = static_cast<int>(c.size());
  const int total = m + n;  // rows then bounds x_j >= 0
  std::vector<int> pick(static_cast<std::size_t>(n));
  double best = -1e300;

  std::vector<int> comb(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) comb[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int r = 0; r < n; ++r) {
      const int id = comb[static_cast<std::size_t>(r)];
      if (id < m) {
        for (int j = 0; j < n; ++j) M(r, j) = A[static_cast<std::size_t>(id)][static_cast<std::size_t>(j)];
        rhs[r] = b[static_cast<std::size_t>(id)];
      } else {
        for (int j = 0; j < n; ++j) M(r, j) = (j == id - m) ? 1.0 : 0.0;
        rhs[r] = 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (lu.isInvertible()) {
      const Eigen::VectorXd x = lu.solve(rhs);
      bool feasible = true;
      for (int j = 0; j < n && feasible; ++j) feasible = x[j] >= -1e-9;
      for (int i = 0; i < m && feasible; ++i) {
        double lhs = 0;
        for (int j = 0; j < n; ++j) lhs += A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[j];
        feasible = lhs <= b[static_cast<std::size_t>(i)] + 1e-9;
      }
      if (feasible) {
        double v = 0;
        for (int j = 0; j < n; ++j) v += c[static_cast<std::size_t>(j)] * x[j];
        best = std::max(best, v);
      }
    }
    int pos = n - 1;
    while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == total - n + pos) --pos;
    if (pos < 0) break;
    ++comb[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < n; ++q) comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
  }
  return best;
}

TEST(DenseSimplex, MatchesVertexEnumerationOnRandomInstances) {
  Rng rng(314159);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.uniform_int(2, 3);
    const int m = rng.uniform_int(2, 5);
    std::vector<std::vector<double>> A(static_cast<std::size_t>(m + n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    std::vector<double> b(static_cast<std::size_t>(m + n));
    std::vector<double> c(static_cast<std::size_t>(n));
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = rng.uniform_real(-1.0, 2.0);
      b[static_cast<std::size_t>(i)] = rng.uniform_real(0.0, 5.0);
    }
    // Box rows keep the region bounded.
    for (int j = 0; j < n; ++j) {
      A[static_cast<std::size_t>(m + j)][static_cast<std::size_t>(j)] = 1.0;
      b[static_cast<std::size_t>(m + j)] = rng.uniform_real(1.0, 10.0);
    }
    for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(j)] = rng.uniform_real(-1.0, 3.0);

    const SimplexResult res = DenseSimplex(dense_problem(A, b, c)).solve();
    ASSERT_EQ(res.status, SimplexStatus::Optimal) << "trial " << trial;
    const double oracle = enumerate_optimum(A, b, c);
    EXPECT_NEAR(res.objective, oracle, 1e-7 * (1.0 + std::abs(oracle))) << "trial " << trial;
  }
}

TEST(DenseSimplex, RejectsNegativeRhs) {
  EXPECT_THROW(DenseSimplex(dense_problem({{1}}, {-1}, {1})), std::invalid_argument);
}

}  // namespace
}  // namespace optrr
