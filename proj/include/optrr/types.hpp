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
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/real.hpp"

namespace optrr {

// Domain sizes a_1..a_k of the k categorical attributes. Attributes are
// 0-indexed in code; user-facing messages use 1-based positions.
class AttributeSchema {
 public:
  explicit AttributeSchema(std::vector<int> domain_sizes) : a_(std::move(domain_sizes)) {
    if (a_.empty()) throw std::invalid_argument("schema: need at least one attribute");
    for (std::size_t i = 0; i < a_.size(); ++i) {
      if (a_[i] < 2) {
        throw std::invalid_argument("schema: attribute " + std::to_string(i + 1) +
                                    " has domain size " + std::to_string(a_[i]) +
                                    "; sizes must be >= 2");
      }
    }
  }

  int attribute_count() const { return static_cast<int>(a_.size()); }
  int domain_size(int i) const { return a_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& domain_sizes() const { return a_; }

  // prod a_i, exact in extended precision.
  Real domain_product() const {
    Real p = 1;
    for (int ai : a_) p *= ai;
    return p;
  }

  bool operator==(const AttributeSchema& o) const { return a_ == o.a_; }

 private:
  std::vector<int> a_;
};

// Per-attribute privacy levels eps_1..eps_k in nats.
class PrivacyBudget {
 public:
  explicit PrivacyBudget(std::vector<double> eps) : eps_(std::move(eps)) {
    if (eps_.empty()) throw std::invalid_argument("budget: need at least one level");
    for (std::size_t i = 0; i < eps_.size(); ++i) {
      if (!(eps_[i] > 0.0) || !std::isfinite(eps_[i])) {
        throw std::invalid_argument("budget: eps for attribute " + std::to_string(i + 1) +
                                    " must be positive and finite");
      }
    }
  }

  int size() const { return static_cast<int>(eps_.size()); }
  double level(int i) const { return eps_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& levels() const { return eps_; }

  double total() const {
    double s = 0;
    for (double e : eps_) s += e;
    return s;
  }

  void check_matches(const AttributeSchema& schema) const {
    if (size() != schema.attribute_count()) {
      throw std::invalid_argument("budget: got " + std::to_string(size()) +
                                  " levels for " + std::to_string(schema.attribute_count()) +
                                  " attributes");
    }
  }

 private:
  std::vector<double> eps_;
};

enum class Method { OptimalLp, Heuristic, Kronecker };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::OptimalLp: return "optimal-lp";
    case Method::Heuristic: return "heuristic";
    case Method::Kronecker: return "kronecker";
  }
  throw std::logic_error("unreachable");
}

inline Method method_from_name(const std::string& s) {
  if (s == "optimal-lp" || s == "optimal") return Method::OptimalLp;
  if (s == "heuristic") return Method::Heuristic;
  if (s == "kronecker") return Method::Kronecker;
  throw std::invalid_argument("unknown method '" + s +
                              "' (expected optimal-lp, heuristic or kronecker)");
}

// Build summary attached to a constructed mechanism.
struct MechanismReport {
  std::vector<double> requested_eps;
  std::vector<double> achieved_eps;
  double eps_total = 0;  // ln(x_0)
  Method method = Method::Heuristic;
  double build_seconds = 0;
  bool fallback_fired = false;
};

}  // namespace optrr
