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

// lie_closure.hpp: dimension of the dynamical Lie algebra generated by
// {i H_k}. A system of traceless generators on C^d is fully controllable iff
// that dimension is d^2 - 1.

#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "qdist/linalg.hpp"

namespace qdist {

struct LieClosureResult {
  std::size_t dimension = 0;
  /// Skew-Hermitian, traceless, orthonormal under Re tr(A^dagger B).
  std::vector<ComplexMatrix> basis;
  /// Number of commutator sweeps performed.
  std::size_t depth = 0;
  bool converged = true;
};

namespace detail {

inline double hs_real_dot(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.array().conjugate() * b.array()).sum().real();
}

// Orthonormal set under the real Hilbert-Schmidt inner product, built by
// modified Gram-Schmidt with one re-orthogonalization pass.
class RealSpanBasis {
 public:
  explicit RealSpanBasis(double rel_tol) : rel_tol_(rel_tol) {}

  /// Accepts the candidate if its component outside the span exceeds
  /// rel_tol * scale. The scale must be a property of the inputs (for a
  /// commutator of unit elements, 1), not of the candidate itself: otherwise
  /// a roundoff-sized commutator of commuting elements would pass.
  bool try_add(ComplexMatrix candidate, double scale) {
    if (candidate.norm() == 0.0) return false;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : elems_) candidate -= hs_real_dot(e, candidate) * e;
    }
    const double after = candidate.norm();
    if (after <= rel_tol_ * scale) return false;
    elems_.push_back(candidate / after);
    return true;
  }

  std::size_t size() const { return elems_.size(); }
  const ComplexMatrix& operator[](std::size_t k) const { return elems_[k]; }
  std::vector<ComplexMatrix> release() && { return std::move(elems_); }

 private:
  double rel_tol_;
  std::vector<ComplexMatrix> elems_;
};

}  // namespace detail

/// Breadth-first commutator closure of {i H_k}. Each sweep brackets every
/// element added in the previous sweep against the whole basis, in index order,
/// so the result is reproducible. Stops when a sweep adds nothing, when the
/// dimension reaches d^2 - 1, or after d^2 sweeps (converged = false).
inline LieClosureResult lie_dimension(std::span<const HermitianOperator> generators,
                                      const ToleranceConfig& tol = {}) {
  tol.validate();
  if (generators.empty()) throw InputError("lie_dimension: no generators");
  const std::size_t d = generators.front().dim();
  for (const auto& g : generators) {
    if (g.dim() != d) throw InputError("lie_dimension: generator dimension mismatch");
    if (!g.is_traceless(tol)) {
      throw InputError("lie_dimension: generator is not traceless (tr = " +
                       std::to_string(g.trace()) + ")");
    }
  }
  const std::size_t full = d * d - 1;

  detail::RealSpanBasis basis(tol.rank_rel_tol);
  double largest = 0.0;
  for (const auto& g : generators) largest = std::max(largest, g.matrix().norm());
  for (const auto& g : generators) {
    if (basis.size() == full) break;
    basis.try_add(kI * g.matrix(), largest);
  }

  LieClosureResult out;
  std::size_t frontier_begin = 0;
  std::size_t frontier_end = basis.size();
  const std::size_t max_sweeps = d * d;
  while (frontier_begin < frontier_end && basis.size() < full) {
    if (out.depth == max_sweeps) {
      out.converged = false;
      break;
    }
    ++out.depth;
    for (std::size_t i = frontier_begin; i < frontier_end && basis.size() < full; ++i) {
      for (std::size_t j = 0; j < frontier_end && basis.size() < full; ++j) {
        // Pairs inside the frontier are visited once.
        if (j >= frontier_begin && j <= i) continue;
        basis.try_add(commutator(basis[i], basis[j]), 1.0);
      }
    }
    frontier_begin = frontier_end;
    frontier_end = basis.size();
  }

  out.dimension = basis.size();
  out.basis = std::move(basis).release();
  return out;
}

inline bool is_controllable_lie(std::span<const HermitianOperator> generators,
                                const ToleranceConfig& tol = {}) {
  const std::size_t d = generators.empty() ? 0 : generators.front().dim();
  return lie_dimension(generators, tol).dimension == d * d - 1;
}

}  // namespace qdist
