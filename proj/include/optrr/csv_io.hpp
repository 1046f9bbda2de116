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
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "optrr/mechanism.hpp"
#include "optrr/types.hpp"

namespace optrr {

// Dataset files are plain CSV: a header row with attribute names, then one
// record per row as 0-based integer category codes.
struct Dataset {
  std::vector<std::string> header;
  std::vector<Record> records;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline Dataset read_dataset(std::istream& in, const AttributeSchema& schema) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset: empty file (missing header)");
  ds.header = split_csv_line(line);
  if (static_cast<int>(ds.header.size()) != schema.attribute_count())
    throw std::runtime_error("dataset: header has " + std::to_string(ds.header.size()) +
                             " columns, schema expects " +
                             std::to_string(schema.attribute_count()));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != ds.header.size())
      throw std::runtime_error("dataset: line " + std::to_string(lineno) + " has " +
                               std::to_string(fields.size()) + " fields");
    Record rec(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      try {
        rec[i] = std::stoi(fields[i]);
      } catch (const std::exception&) {
        throw std::runtime_error("dataset: line " + std::to_string(lineno) +
                                 ": '" + fields[i] + "' is not an integer code");
      }
    }
    validate_record(schema, rec);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

inline Dataset read_dataset_file(const std::string& path, const AttributeSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset(in, schema);
}

inline void write_dataset(std::ostream& out, const Dataset& ds) {
  for (std::size_t i = 0; i < ds.header.size(); ++i) out << (i ? "," : "") << ds.header[i];
  out << "\n";
  for (const Record& rec : ds.records) {
    for (std::size_t i = 0; i < rec.size(); ++i) out << (i ? "," : "") << rec[i];
    out << "\n";
  }
}

inline void write_dataset_file(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset(out, ds);
}

}  // namespace optrr
