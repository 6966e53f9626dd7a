// Copyright 2026 The qdist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// qdist.hpp: umbrella header.

#pragma once

#include "qdist/commutant.hpp"
#include "qdist/control_system.hpp"
#include "qdist/distance.hpp"
#include "qdist/errors.hpp"
#include "qdist/json_io.hpp"
#include "qdist/lie_closure.hpp"
#include "qdist/linalg.hpp"
#include "qdist/min_cut.hpp"
#include "qdist/models.hpp"
#include "qdist/speed_limit.hpp"

namespace qdist {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qdist
