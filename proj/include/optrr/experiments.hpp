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
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/build.hpp"
#include "optrr/calibrate.hpp"
#include "optrr/mechanism.hpp"
#include "optrr/rng.hpp"
#include "optrr/types.hpp"

namespace optrr {

// ---------------------------------------------------------------------------
// Privacy-ratio sweeps
// ---------------------------------------------------------------------------

struct SweepRow {
  int trial = 0;
  int k = 0;
  double sum_eps = 0;
  double sum_a = 0;
  std::string method;
  double achieved_total = std::numeric_limits<double>::quiet_NaN();
  double ratio_to_sum_eps = std::numeric_limits<double>::quiet_NaN();
  double ratio_to_optimal = std::numeric_limits<double>::quiet_NaN();
  double build_seconds = 0;
  std::string note;
};

namespace detail {
inline double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

struct TrialOutcome {
  double optimal_total = std::numeric_limits<double>::quiet_NaN();
  bool lp_ok = false;
};
}  // namespace detail

struct SweepOptions {
  bool include_lp = true;          // build the exact mechanism when k permits
  LpOptions lp;                    // cap and per-instance time limit
  double lp_time_limit_sec = 300;  // recorded, not fatal, when exceeded
};

// One trial of a sweep: builds kronecker (analytic total), heuristic, and,
// when enabled and within the cap, the exact LP mechanism.
//
// When the heuristic's repair step fires, the mechanism guarantees different
// per-attribute levels than requested; its optimality ratio is then taken
// against the exact optimum for the levels it actually guarantees (at the
// requested levels the two mechanisms would not be comparable), and the row
// carries a "fallback" note.
inline void sweep_trial(std::vector<SweepRow>& out, int trial, const AttributeSchema& schema,
                        const PrivacyBudget& budget, const SweepOptions& opt) {
  const int k = schema.attribute_count();
  double sum_a = 0;
  for (int ai : schema.domain_sizes()) sum_a += ai;
  const double sum_eps = budget.total();

  SweepRow base;
  base.trial = trial;
  base.k = k;
  base.sum_eps = sum_eps;
  base.sum_a = sum_a;

  LpOptions lpo = opt.lp;
  lpo.time_limit_sec = opt.lp_time_limit_sec;

  // Exact mechanism first so the other rows can report their optimality ratio.
  detail::TrialOutcome oc;
  const bool lp_applicable = opt.include_lp && k <= opt.lp.k_cap;
  if (lp_applicable) {
    SweepRow lp_row = base;
    lp_row.method = method_name(Method::OptimalLp);
    try {
      const double t0 = detail::now_seconds();
      const DistortionSpec spec = solve_optimal(schema, budget, lpo);
      lp_row.build_seconds = detail::now_seconds() - t0;
      lp_row.achieved_total = audit_total(spec);
      lp_row.ratio_to_sum_eps = lp_row.achieved_total / sum_eps;
      lp_row.ratio_to_optimal = 1.0;
      oc.optimal_total = lp_row.achieved_total;
      oc.lp_ok = true;
    } catch (const LpTimeoutError&) {
      lp_row.note = "lp-timeout";
    }
    out.push_back(lp_row);
  }

  {
    SweepRow row = base;
    row.method = method_name(Method::Heuristic);
    InductionStats stats;
    const double t0 = detail::now_seconds();
    const DistortionSpec spec = heuristic_build(schema, budget, &stats);
    row.build_seconds = detail::now_seconds() - t0;
    row.achieved_total = audit_total(spec);
    row.ratio_to_sum_eps = row.achieved_total / sum_eps;
    const bool fallback = !stats.fallback_levels.empty();
    if (fallback) row.note = "fallback";
    if (oc.lp_ok) {
      double reference = oc.optimal_total;
      if (fallback) {
        try {
          reference = audit_total(solve_optimal(schema, PrivacyBudget(spec.achieved_eps), lpo));
        } catch (const LpTimeoutError&) {
          reference = std::numeric_limits<double>::quiet_NaN();
        }
      }
      row.ratio_to_optimal = row.achieved_total / reference;
    }
    out.push_back(row);
  }

  {
    // The Kronecker composed level equals sum eps_i identically, so the row
    // is analytic and valid at any k.
    SweepRow row = base;
    row.method = method_name(Method::Kronecker);
    row.achieved_total = sum_eps;
    row.ratio_to_sum_eps = 1.0;
    if (oc.lp_ok) row.ratio_to_optimal = sum_eps / oc.optimal_total;
    out.push_back(row);
  }
}

// Fixed a_i, random per-attribute levels from [eps_lo, eps_hi).
inline std::vector<SweepRow> sweep_eps(int k, int a_fixed, double eps_lo, double eps_hi,
                                       int trials, std::uint64_t seed,
                                       const SweepOptions& opt = {}) {
  if (k < 2) throw std::invalid_argument("sweep_eps: k must be >= 2");
  std::vector<SweepRow> out;
  const AttributeSchema schema(std::vector<int>(static_cast<std::size_t>(k), a_fixed));
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_stream(seed, static_cast<std::uint64_t>(trial));
    std::vector<double> eps(static_cast<std::size_t>(k));
    for (double& e : eps) e = rng.uniform_real(eps_lo, eps_hi);
    sweep_trial(out, trial, schema, PrivacyBudget(eps), opt);
  }
  return out;
}

// Fixed eps_i, random domain sizes from {a_lo..a_hi}.
inline std::vector<SweepRow> sweep_a(int k, double eps_fixed, int a_lo, int a_hi, int trials,
                                     std::uint64_t seed, const SweepOptions& opt = {}) {
  if (k < 2) throw std::invalid_argument("sweep_a: k must be >= 2");
  if (a_lo < 2) throw std::invalid_argument("sweep_a: domain sizes must be >= 2");
  std::vector<SweepRow> out;
  const PrivacyBudget budget(std::vector<double>(static_cast<std::size_t>(k), eps_fixed));
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = derive_stream(seed, static_cast<std::uint64_t>(trial));
    std::vector<int> a(static_cast<std::size_t>(k));
    for (int& ai : a) ai = rng.uniform_int(a_lo, a_hi);
    sweep_trial(out, trial, AttributeSchema(a), budget, opt);
  }
  return out;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "trial,k,sum_eps,sum_a,method,achieved_eps_total,ratio_to_sum_eps,"
        "ratio_to_optimal,build_seconds,note\n";
  char buf[512];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.12g,%.12g,%s,%.12g,%.12g,%.12g,%.12g,%s\n", r.trial,
                  r.k, r.sum_eps, r.sum_a, r.method.c_str(), r.achieved_total,
                  r.ratio_to_sum_eps, r.ratio_to_optimal, r.build_seconds, r.note.c_str());
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Genome statistics experiment
// ---------------------------------------------------------------------------

// 2x2 allele/disease counts for one SNP; A+B+C+D = 2N.
struct ContingencyTable {
  long long A = 0, B = 0, C = 0, D = 0;

  long long total() const { return A + B + C + D; }
};

struct ChiSquare {
  double value = 0;
  bool degenerate = false;  // some marginal was empty; value pinned to 0
};

// 2N (AD - BC)^2 / ((A+B)(C+D)(A+C)(B+D)), evaluated exactly before the
// final division. An empty marginal yields 0 with the degenerate flag set.
inline ChiSquare chi_square(const ContingencyTable& t) {
  if (t.A < 0 || t.B < 0 || t.C < 0 || t.D < 0)
    throw std::invalid_argument("chi_square: negative count");
  const Real ab = Real(t.A) + t.B, cd = Real(t.C) + t.D;
  const Real ac = Real(t.A) + t.C, bd = Real(t.B) + t.D;
  if (ab == 0 || cd == 0 || ac == 0 || bd == 0) return ChiSquare{0.0, true};
  const Real det = Real(t.A) * t.D - Real(t.B) * t.C;
  const Real num = Real(t.total()) * det * det;
  return ChiSquare{to_double(num / (ab * cd * ac * bd)), false};
}

// Sequential binomial table generator: A ~ Bin(2N, 1/3), B ~ Bin(2N-A, 1/3),
// C ~ Bin(2N-A-B, 2/5), D the remainder.
inline std::vector<ContingencyTable> gen_snp_tables(int k, long long N, Rng& rng) {
  if (N < 1) throw std::invalid_argument("gen_snp_tables: N must be >= 1");
  std::vector<ContingencyTable> tables(static_cast<std::size_t>(k));
  for (auto& t : tables) {
    const long long total = 2 * N;
    t.A = rng.binomial(total, 1.0 / 3.0);
    t.B = rng.binomial(total - t.A, 1.0 / 3.0);
    t.C = rng.binomial(total - t.A - t.B, 2.0 / 5.0);
    t.D = total - t.A - t.B - t.C;
  }
  return tables;
}

// Reconstruction convention for the record-level experiment: SNP i's column
// is a seeded random permutation of its category multiset (A zeros, B ones,
// C twos, D threes), so cross-SNP correlation is random.
inline std::vector<Record> expand_to_records(const std::vector<ContingencyTable>& tables,
                                             Rng& rng) {
  const std::size_t k = tables.size();
  if (k == 0) return {};
  const std::size_t rows = static_cast<std::size_t>(tables[0].total());
  std::vector<Record> records(rows, Record(k, 0));
  std::vector<int> column;
  for (std::size_t i = 0; i < k; ++i) {
    if (static_cast<std::size_t>(tables[i].total()) != rows)
      throw std::invalid_argument("expand_to_records: tables disagree on 2N");
    column.clear();
    column.insert(column.end(), static_cast<std::size_t>(tables[i].A), 0);
    column.insert(column.end(), static_cast<std::size_t>(tables[i].B), 1);
    column.insert(column.end(), static_cast<std::size_t>(tables[i].C), 2);
    column.insert(column.end(), static_cast<std::size_t>(tables[i].D), 3);
    rng.shuffle(column);
    for (std::size_t r = 0; r < rows; ++r) records[r][i] = column[r];
  }
  return records;
}

inline ContingencyTable table_from_column(const std::vector<Record>& records, std::size_t i) {
  ContingencyTable t;
  for (const Record& r : records) {
    switch (r[i]) {
      case 0: ++t.A; break;
      case 1: ++t.B; break;
      case 2: ++t.C; break;
      default: ++t.D; break;
    }
  }
  return t;
}

struct ChiSqRow {
  int run = 0;
  int snp = 0;
  std::string method;
  double chi2_original = 0;
  double chi2_noisy = 0;
  double abs_diff = 0;
};

struct ChiSqMethodSummary {
  std::string method;
  std::vector<double> per_attribute_eps;  // calibrated budget
  double pooled_mean_abs_diff = 0;        // over all (run, snp) pairs
  std::vector<double> per_run_mean;
};

struct ChiSqResult {
  std::vector<ChiSqRow> rows;
  std::vector<ChiSqMethodSummary> summaries;
};

struct ChiSqConfig {
  int k = 10;
  long long N = 1000;
  double eps_total = 0;  // required; the experiment fixes the overall level
  std::vector<double> weights;  // empty = uniform
  int runs = 10;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::Heuristic, Method::Kronecker};
};

// Fixed-overall-level utility comparison on synthetic SNP tables. Each
// attribute has four categories (allele x disease). Budgets are calibrated
// once per method; each run regenerates tables, expands them to 2N records,
// perturbs with each mechanism, and compares per-SNP chi-square statistics.
inline ChiSqResult chisq_experiment(const ChiSqConfig& cfg) {
  if (!(cfg.eps_total > 0))
    throw std::invalid_argument("chisq_experiment: eps_total must be positive");
  if (cfg.k < 2) throw std::invalid_argument("chisq_experiment: k must be >= 2");
  const AttributeSchema schema(std::vector<int>(static_cast<std::size_t>(cfg.k), 4));
  std::vector<double> weights = cfg.weights;
  if (weights.empty()) weights.assign(static_cast<std::size_t>(cfg.k), 1.0);

  ChiSqResult res;
  std::vector<Perturber> perturbers;
  for (Method m : cfg.methods) {
    const CalibrationResult cal = calibrate(schema, weights, cfg.eps_total, m);
    const BuiltMechanism built = build_mechanism(schema, cal.budget, m);
    perturbers.emplace_back(built.spec);
    ChiSqMethodSummary summary;
    summary.method = method_name(m);
    summary.per_attribute_eps = cal.budget.levels();
    res.summaries.push_back(std::move(summary));
  }

  std::vector<std::vector<double>> run_means(cfg.methods.size());
  std::vector<double> pooled_sum(cfg.methods.size(), 0.0);
  std::size_t pooled_count = 0;

  for (int run = 0; run < cfg.runs; ++run) {
    Rng data_rng = derive_stream(cfg.seed, 100 + static_cast<std::uint64_t>(run));
    const auto tables = gen_snp_tables(cfg.k, cfg.N, data_rng);
    const auto records = expand_to_records(tables, data_rng);

    std::vector<double> original(static_cast<std::size_t>(cfg.k));
    for (int i = 0; i < cfg.k; ++i) original[static_cast<std::size_t>(i)] = chi_square(tables[static_cast<std::size_t>(i)]).value;

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      Rng noise_rng = derive_stream(cfg.seed, 100000 + static_cast<std::uint64_t>(run) * 16 + mi);
      std::vector<Record> noisy(records.size());
      for (std::size_t r = 0; r < records.size(); ++r)
        noisy[r] = perturbers[mi](records[r], noise_rng);

      double run_sum = 0;
      for (int i = 0; i < cfg.k; ++i) {
        const ContingencyTable nt = table_from_column(noisy, static_cast<std::size_t>(i));
        const double noisy_chi = chi_square(nt).value;
        const double diff = std::abs(original[static_cast<std::size_t>(i)] - noisy_chi);
        res.rows.push_back(ChiSqRow{run, i, method_name(cfg.methods[mi]),
                                    original[static_cast<std::size_t>(i)], noisy_chi, diff});
        run_sum += diff;
        pooled_sum[mi] += diff;
      }
      run_means[mi].push_back(run_sum / cfg.k);
    }
    pooled_count += static_cast<std::size_t>(cfg.k);
  }

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    res.summaries[mi].pooled_mean_abs_diff =
        pooled_count ? pooled_sum[mi] / static_cast<double>(pooled_count) : 0.0;
    res.summaries[mi].per_run_mean = run_means[mi];
  }
  return res;
}

inline void write_chisq_csv(std::ostream& os, const ChiSqResult& res) {
  os << "run,snp,method,chi2_original,chi2_noisy,abs_diff\n";
  char buf[256];
  for (const ChiSqRow& r : res.rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%s,%.12g,%.12g,%.12g\n", r.run, r.snp,
                  r.method.c_str(), r.chi2_original, r.chi2_noisy, r.abs_diff);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Run-time measurements
// ---------------------------------------------------------------------------

struct RuntimeRow {
  int k = 0;
  std::string method;
  double median_seconds = 0;
  double min_seconds = 0;
  double max_seconds = 0;
  int trials = 0;
};

// Build-time medians per (method, k). Inputs drawn per trial: a_i from
// {2..5}, eps_i from [1, 10). Exact solves are limited to k <= lp_k_cap.
inline std::vector<RuntimeRow> runtime_bench(const std::vector<int>& k_list, int trials,
                                             std::uint64_t seed, int lp_k_cap = 10) {
  std::vector<RuntimeRow> out;
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n == 0 ? 0.0 : (n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
  };

  for (int k : k_list) {
    std::vector<double> heur_times, lp_times;
    for (int trial = 0; trial < trials; ++trial) {
      Rng rng = derive_stream(seed, static_cast<std::uint64_t>(k) * 1000003ULL +
                                        static_cast<std::uint64_t>(trial));
      std::vector<int> a(static_cast<std::size_t>(k));
      std::vector<double> eps(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        a[static_cast<std::size_t>(i)] = rng.uniform_int(2, 5);
        eps[static_cast<std::size_t>(i)] = rng.uniform_real(1.0, 10.0);
      }
      const AttributeSchema schema(a);
      const PrivacyBudget budget(eps);

      double t0 = detail::now_seconds();
      heuristic_build(schema, budget);
      heur_times.push_back(detail::now_seconds() - t0);

      if (k <= lp_k_cap) {
        t0 = detail::now_seconds();
        solve_optimal(schema, budget);
        lp_times.push_back(detail::now_seconds() - t0);
      }
    }
    if (!lp_times.empty())
      out.push_back(RuntimeRow{k, method_name(Method::OptimalLp), median(lp_times),
                               *std::min_element(lp_times.begin(), lp_times.end()),
                               *std::max_element(lp_times.begin(), lp_times.end()),
                               static_cast<int>(lp_times.size())});
    out.push_back(RuntimeRow{k, method_name(Method::Heuristic), median(heur_times),
                             *std::min_element(heur_times.begin(), heur_times.end()),
                             *std::max_element(heur_times.begin(), heur_times.end()),
                             static_cast<int>(heur_times.size())});
  }
  return out;
}

inline void write_runtime_csv(std::ostream& os, const std::vector<RuntimeRow>& rows) {
  os << "k,method,median_seconds,min_seconds,max_seconds,trials\n";
  char buf[256];
  for (const RuntimeRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.12g,%.12g,%.12g,%d\n", r.k, r.method.c_str(),
                  r.median_seconds, r.min_seconds, r.max_seconds, r.trials);
    os << buf;
  }
}

}  // namespace optrr
