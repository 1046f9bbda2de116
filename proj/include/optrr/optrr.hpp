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

#include "optrr/build.hpp"
#include "optrr/calibrate.hpp"
#include "optrr/csv_io.hpp"
#include "optrr/distortion_spec.hpp"
#include "optrr/experiments.hpp"
#include "optrr/inductive.hpp"
#include "optrr/json_io.hpp"
#include "optrr/kronecker.hpp"
#include "optrr/linear_program.hpp"
#include "optrr/lp_solve.hpp"
#include "optrr/mechanism.hpp"
#include "optrr/real.hpp"
#include "optrr/rng.hpp"
#include "optrr/simplex.hpp"
#include "optrr/subset_index.hpp"
#include "optrr/two_attribute.hpp"
#include "optrr/types.hpp"
