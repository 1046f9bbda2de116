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
#include <limits>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace optrr {

// Extended-precision real used for all distortion values and class sums.
// 128-bit binary significand with a 32-bit exponent, so products like
// prod(a_i) and the ratio x_{k,0} stay representable far past the range of
// a double (needed around k ~ 1000).
using Real = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<128, boost::multiprecision::digit_base_2,
                                         void, std::int32_t>,
    boost::multiprecision::et_off>;

// Decimal round-trip form; parsing the result reproduces the value exactly.
inline std::string to_decimal_string(const Real& v) {
  return v.str(std::numeric_limits<Real>::max_digits10, std::ios_base::scientific);
}

inline Real real_from_string(const std::string& s) { return Real(s); }

inline double to_double(const Real& v) { return static_cast<double>(v); }

}  // namespace optrr
