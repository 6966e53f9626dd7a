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

// Library walk-through: two qubits coupled by delta Z(x)Z with full local
// control. Prints the controllability verdict, the distance estimate and the
// resulting minimum-time bound next to the exact minimum time.

#include <cstdio>
#include <numbers>

#include "qdist/qdist.hpp"

int main() {
  using namespace qdist;
  for (double delta : {0.5, 1.0, 2.0}) {
    const ControlSystem system = build_two_qubit_ising(delta);
    const auto verdict = decide_controllability(system);
    const auto est = epsilon_best(system);
    const auto bound = delta_lower_bound(system, est.upper);
    const auto report = t_star_lower(system, est.upper, bound);
    std::printf("delta=%.2f  controllable=%d  eps in [%.4f, %.4f]  T* >= %.4f  (exact %.4f)\n", delta,
                verdict.controllable ? 1 : 0, est.lower.value_or(0.0), est.upper.op_norm, report.t_star_lower,
                std::numbers::pi / (2.0 * delta));
  }
  return 0;
}
