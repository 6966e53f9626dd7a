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

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/commutant.hpp"
#include "qdist/lie_closure.hpp"
#include "qdist/linalg.hpp"

namespace qdist {

struct BoundedGenerator {
  HermitianOperator op;
  double cap = 1.0;
};

enum class GeneratorKind { drift, bounded, unbounded };

struct GeneratorRole {
  GeneratorKind kind = GeneratorKind::drift;
  /// Index within its own list (0 for the drift).
  std::size_t local_index = 0;
  /// Amplitude cap; 1 for the drift, +inf for unbounded controls.
  double cap = 1.0;
};

/// H(t) = H_d + sum_j g_j(t) Ht_j + sum_k f_k(t) H_k with |g_j| <= c_j.
///
/// Operators are stored as given (they need not be traceless); algebraic tests
/// use traceless-shifted copies, which changes neither dynamics nor commutators.
/// The flat generator order used by certificates and pulses is
/// [drift (if any), bounded..., unbounded...].
class ControlSystem {
 public:
  ControlSystem() = default;

  ControlSystem(std::optional<HermitianOperator> drift, std::vector<BoundedGenerator> bounded,
                std::vector<HermitianOperator> unbounded)
      : drift_(std::move(drift)), bounded_(std::move(bounded)), unbounded_(std::move(unbounded)) {
    std::optional<std::size_t> d;
    auto check = [&](const HermitianOperator& h) {
      if (!d) d = h.dim();
      if (h.dim() != *d) throw InputError("ControlSystem: generator dimension mismatch");
    };
    if (drift_) check(*drift_);
    for (const auto& b : bounded_) {
      check(b.op);
      if (!(b.cap > 0.0) || !std::isfinite(b.cap)) {
        throw InputError("ControlSystem: amplitude caps must be finite and positive");
      }
    }
    for (const auto& u : unbounded_) check(u);
    if (!d) throw InputError("ControlSystem: no generators");
    dim_ = *d;
  }

  std::size_t dim() const { return dim_; }
  const std::optional<HermitianOperator>& drift() const { return drift_; }
  const std::vector<BoundedGenerator>& bounded() const { return bounded_; }
  const std::vector<HermitianOperator>& unbounded() const { return unbounded_; }

  std::size_t generator_count() const {
    return (drift_ ? 1 : 0) + bounded_.size() + unbounded_.size();
  }
  /// Number of pulse amplitudes per segment (bounded then unbounded).
  std::size_t control_count() const { return bounded_.size() + unbounded_.size(); }

  std::vector<HermitianOperator> generators() const {
    std::vector<HermitianOperator> out;
    out.reserve(generator_count());
    if (drift_) out.push_back(*drift_);
    for (const auto& b : bounded_) out.push_back(b.op);
    for (const auto& u : unbounded_) out.push_back(u);
    return out;
  }

  std::vector<HermitianOperator> traceless_generators() const {
    auto out = generators();
    for (auto& g : out) g = g.traceless();
    return out;
  }

  GeneratorRole role(std::size_t flat_index) const {
    if (flat_index >= generator_count()) {
      throw InputError("generator index " + std::to_string(flat_index) + " out of range (" +
                       std::to_string(generator_count()) + " generators)");
    }
    std::size_t k = flat_index;
    if (drift_) {
      if (k == 0) return {GeneratorKind::drift, 0, 1.0};
      --k;
    }
    if (k < bounded_.size()) return {GeneratorKind::bounded, k, bounded_[k].cap};
    k -= bounded_.size();
    return {GeneratorKind::unbounded, k, std::numeric_limits<double>::infinity()};
  }

  /// Flat index of the drift, if present.
  std::optional<std::size_t> drift_index() const {
    return drift_ ? std::optional<std::size_t>(0) : std::nullopt;
  }
  std::size_t bounded_index(std::size_t j) const { return (drift_ ? 1 : 0) + j; }
  std::size_t unbounded_index(std::size_t k) const {
    return (drift_ ? 1 : 0) + bounded_.size() + k;
  }

  /// Copy with generator `flat_index` replaced by `op`.
  ControlSystem with_generator(std::size_t flat_index, const HermitianOperator& op) const {
    const GeneratorRole r = role(flat_index);
    if (op.dim() != dim_) throw InputError("ControlSystem: replacement dimension mismatch");
    ControlSystem out = *this;
    switch (r.kind) {
      case GeneratorKind::drift: out.drift_ = op; break;
      case GeneratorKind::bounded: out.bounded_[r.local_index].op = op; break;
      case GeneratorKind::unbounded: out.unbounded_[r.local_index] = op; break;
    }
    return out;
  }

 private:
  std::optional<HermitianOperator> drift_;
  std::vector<BoundedGenerator> bounded_;
  std::vector<HermitianOperator> unbounded_;
  std::size_t dim_ = 0;
};

/// Which controllability test(s) produced a verdict.
struct ControllabilityVerdict {
  bool controllable = false;
  std::optional<std::size_t> lie_dimension;
  std::optional<std::size_t> commutant_nullity;
  /// Dimension of the commutant on C^d; set when the reducibility check ran.
  std::optional<std::size_t> original_commutant_dimension;
};

/// Above kCommutantMaxDim, sets with a nontrivial commutant on C^d are
/// declared uncontrollable before the Lie closure runs. Near-reducible sets
/// leak roundoff into nested commutators and the closure can reach su(d)
/// spuriously; the rank test on the d^2 x d^2 stack does not have that
/// problem. Skipped above this dimension.
inline constexpr std::size_t kReducibilityMaxDim = 24;

/// Commutant test for d <= kCommutantMaxDim, Lie closure above that. For
/// d <= 4 both run and must agree; a disagreement is a numerical failure.
/// A reducible set (d <= kReducibilityMaxDim) is uncontrollable outright.
inline ControllabilityVerdict decide_controllability(std::span<const HermitianOperator> generators,
                                                     const ToleranceConfig& tol = {}) {
  if (generators.empty()) throw InputError("decide_controllability: no generators");
  std::vector<HermitianOperator> shifted(generators.begin(), generators.end());
  for (auto& g : shifted) g = g.traceless();
  const std::size_t d = shifted.front().dim();
  ControllabilityVerdict v;
  if (d <= kCommutantMaxDim) {
    const auto c = commutant_dimension(shifted, tol, {.force = false, .want_symmetries = false});
    v.commutant_nullity = c.nullity;
    v.controllable = c.controllable;
  }
  if (d > kCommutantMaxDim && d <= kReducibilityMaxDim) {
    const std::size_t dim = original_space_commutant(shifted, tol).size();
    v.original_commutant_dimension = dim;
    if (dim > 1) {
      v.controllable = false;
      return v;
    }
  }
  if (d <= 4 || d > kCommutantMaxDim) {
    const auto l = lie_dimension(shifted, tol);
    v.lie_dimension = l.dimension;
    const bool lie_ok = l.dimension == d * d - 1;
    if (v.commutant_nullity && lie_ok != v.controllable) {
      throw NumericalError("controllability tests disagree (Lie dimension " +
                           std::to_string(l.dimension) + ", commutant nullity " +
                           std::to_string(*v.commutant_nullity) + ")");
    }
    v.controllable = lie_ok;
  }
  return v;
}

inline ControllabilityVerdict decide_controllability(const ControlSystem& system,
                                                     const ToleranceConfig& tol = {}) {
  const auto gens = system.generators();
  return decide_controllability(gens, tol);
}

}  // namespace qdist
