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

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "optrr/distortion_spec.hpp"
#include "optrr/types.hpp"

namespace optrr {

// On-disk mechanism format. Ratio values are decimal strings so the extended
// precision survives the round trip bit-for-bit.
inline nlohmann::json spec_to_json(const DistortionSpec& spec) {
  nlohmann::json j;
  j["schema"] = {{"a", spec.schema.domain_sizes()}};
  j["kind"] = kind_name(spec.kind);
  std::vector<std::string> xs;
  xs.reserve(spec.x.size());
  for (const Real& v : spec.x) xs.push_back(to_decimal_string(v));
  j["x"] = xs;
  j["achieved_eps"] = spec.achieved_eps;
  j["method"] = method_name(spec.method);
  j["log_scale"] = spec.log_scale;
  return j;
}

inline DistortionSpec spec_from_json(const nlohmann::json& j) {
  if (!j.contains("schema") || !j["schema"].contains("a"))
    throw std::invalid_argument("mechanism json: missing schema.a");
  AttributeSchema schema(j["schema"]["a"].get<std::vector<int>>());
  DistortionSpec spec{std::move(schema)};
  spec.kind = kind_from_name(j.at("kind").get<std::string>());
  for (const auto& s : j.at("x")) spec.x.push_back(real_from_string(s.get<std::string>()));
  spec.achieved_eps = j.at("achieved_eps").get<std::vector<double>>();
  spec.method = method_from_name(j.at("method").get<std::string>());
  spec.log_scale = j.value("log_scale", false);
  if (spec.x.size() != spec.expected_length())
    throw std::invalid_argument("mechanism json: wrong number of x values");
  return spec;
}

inline void save_spec(const DistortionSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << spec_to_json(spec).dump(2) << "\n";
}

inline DistortionSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return spec_from_json(j);
}

inline nlohmann::json report_to_json(const MechanismReport& r) {
  return nlohmann::json{{"requested_eps", r.requested_eps},
                        {"achieved_eps", r.achieved_eps},
                        {"eps_total", r.eps_total},
                        {"method", method_name(r.method)},
                        {"build_seconds", r.build_seconds},
                        {"fallback_fired", r.fallback_fired}};
}

}  // namespace optrr
