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

#pragma once

#include <stdexcept>
#include <string>

namespace qdist {

// Each error class maps onto one CLI exit code (see tools/commands.hpp).

/// Malformed or out-of-domain input (dimension mismatch, NaN entries, bad JSON).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical verdict prevents the requested computation, e.g. asking for
/// the distance to uncontrollability of a system that is already uncontrollable.
class VerdictError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem size exceeds a memory/time guard.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical kernel (SVD, eigensolver) failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdist
