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

// distance.hpp: bounds on the distance to uncontrollability, the smallest
// operator norm of a Hermitian perturbation of the selected generator(s) that
// makes the system not fully controllable.
//
// Upper bounds come from explicit perturbations (certificates), each checked by
// running the controllability test on the perturbed system. The lower bound
// comes from Weyl's inequality applied to the stacked adjoint matrix.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdist/commutant.hpp"
#include "qdist/control_system.hpp"
#include "qdist/linalg.hpp"
#include "qdist/min_cut.hpp"

namespace qdist {

enum class DistanceMethod { gap_merge, min_cut, block_search, drift_removal, manual };

inline std::string to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::gap_merge: return "gap_merge";
    case DistanceMethod::min_cut: return "min_cut";
    case DistanceMethod::block_search: return "block_search";
    case DistanceMethod::drift_removal: return "drift_removal";
    case DistanceMethod::manual: return "manual";
  }
  return "manual";
}

inline DistanceMethod distance_method_from_string(const std::string& s) {
  for (auto m : {DistanceMethod::gap_merge, DistanceMethod::min_cut, DistanceMethod::block_search,
                 DistanceMethod::drift_removal, DistanceMethod::manual}) {
    if (to_string(m) == s) return m;
  }
  throw InputError("unknown distance method '" + s + "'");
}

struct Perturbation {
  /// Flat generator index, see ControlSystem.
  std::size_t generator = 0;
  HermitianOperator delta;
};

struct DistanceCertificate {
  std::vector<Perturbation> perturbation;
  /// max_j ||Delta_j|| (spectral norm).
  double op_norm = 0.0;
  /// Sum of entry moduli; in the control eigenbasis for min-cut certificates.
  double l11_norm = 0.0;
  DistanceMethod method = DistanceMethod::manual;
  bool verified_uncontrollable = false;
  /// Zero certificate returned because the drift spectrum is already degenerate.
  bool degenerate = false;
  std::optional<HermitianOperator> symmetry_witness;

  /// Number of generators touched.
  std::size_t touched() const { return perturbation.size(); }

  /// M * max_j ||Delta_j|| for a certificate touching M generators; this is
  /// the epsilon that enters the speed-limit bound.
  double effective_epsilon() const { return static_cast<double>(touched()) * op_norm; }
};

// ----------------------------------------------------------------------------
// Applying and verifying certificates

inline std::vector<HermitianOperator> apply_perturbation(std::span<const HermitianOperator> generators,
                                                         const DistanceCertificate& cert) {
  std::vector<HermitianOperator> out(generators.begin(), generators.end());
  for (const auto& p : cert.perturbation) {
    if (p.generator >= out.size()) {
      throw InputError("certificate perturbs generator " + std::to_string(p.generator) +
                       " but the system has " + std::to_string(out.size()));
    }
    if (p.delta.dim() != out[p.generator].dim()) {
      throw InputError("certificate perturbation dimension mismatch");
    }
    out[p.generator] = out[p.generator] + p.delta;
  }
  return out;
}

inline ControlSystem apply_certificate(const ControlSystem& system, const DistanceCertificate& cert) {
  const auto gens = system.generators();
  const auto perturbed = apply_perturbation(gens, cert);
  ControlSystem out = system;
  for (const auto& p : cert.perturbation) out = out.with_generator(p.generator, perturbed[p.generator]);
  return out;
}

/// True iff the perturbed generator set is not fully controllable.
inline bool verify_perturbation(std::span<const HermitianOperator> generators,
                                const DistanceCertificate& cert, const ToleranceConfig& tol = {}) {
  const auto perturbed = apply_perturbation(generators, cert);
  return !decide_controllability(perturbed, tol).controllable;
}

inline bool verify_certificate(const ControlSystem& system, const DistanceCertificate& cert,
                               const ToleranceConfig& tol = {}) {
  const auto gens = system.generators();
  return verify_perturbation(gens, cert, tol);
}

/// Largest commutation residual ||[S, H_k]|| / max(1, ||H_k||) over the set.
inline double commutation_residual(const ComplexMatrix& s, std::span<const HermitianOperator> generators) {
  double worst = 0.0;
  for (const auto& g : generators) {
    const double scale = std::max(1.0, max_abs(g.matrix()));
    worst = std::max(worst, max_abs(commutator(s, g.matrix())) / scale);
  }
  return worst;
}

namespace detail {

// Witness extraction is an SVD with d^2 columns; beyond this it is skipped.
inline constexpr std::size_t kWitnessMaxDim = 16;

inline void finalize_certificate(DistanceCertificate& cert, std::span<const HermitianOperator> generators,
                                 const ToleranceConfig& tol,
                                 std::optional<HermitianOperator> witness_hint = std::nullopt) {
  cert.op_norm = 0.0;
  cert.l11_norm = 0.0;
  for (const auto& p : cert.perturbation) {
    cert.op_norm = std::max(cert.op_norm, p.delta.norm());
    cert.l11_norm += l11_norm(p.delta.matrix());
  }
  cert.verified_uncontrollable = verify_perturbation(generators, cert, tol);
  cert.symmetry_witness.reset();
  if (!cert.verified_uncontrollable) return;
  const auto perturbed = apply_perturbation(generators, cert);
  if (witness_hint && commutation_residual(witness_hint->matrix(), perturbed) <= tol.commute_tol) {
    cert.symmetry_witness = std::move(witness_hint);
    return;
  }
  if (perturbed.front().dim() <= kWitnessMaxDim) {
    cert.symmetry_witness = extract_original_space_symmetry(perturbed, tol);
  }
}

inline std::vector<HermitianOperator> others(std::span<const HermitianOperator> generators,
                                             std::size_t target) {
  if (target >= generators.size()) throw InputError("target generator index out of range");
  std::vector<HermitianOperator> out;
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (k != target) out.push_back(generators[k]);
  }
  return out;
}

inline double generic_weight(std::size_t k) {
  static constexpr std::array<double, 12> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  return std::sqrt(primes[k % primes.size()]) + static_cast<double>(k / primes.size());
}

// Splits sorted eigenvalues into runs whose neighbours differ by at most `gap_tol`.
inline std::vector<std::vector<std::size_t>> group_sorted(const RealVector& values, double gap_tol) {
  std::vector<std::vector<std::size_t>> groups;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (groups.empty() || values(k) - values(k - 1) > gap_tol) groups.emplace_back();
    groups.back().push_back(static_cast<std::size_t>(k));
  }
  return groups;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Control eigenbasis and its coupling graph

/// Orthonormal basis adapted to the generators that are held fixed.
///
/// If the fixed generators commute, `vectors` is a joint eigenbasis, `units`
/// groups joint-degenerate vectors and every column is a graph vertex. If they
/// do not commute, `units` are the eigenspaces of a generic Hermitian element
/// of their commutant (invariant blocks) and each unit is one vertex.
struct ControlBasis {
  ComplexMatrix vectors;
  std::vector<std::vector<std::size_t>> units;
  bool commuting = true;
};

inline ControlBasis control_basis(std::span<const HermitianOperator> fixed, std::size_t d,
                                  const ToleranceConfig& tol = {}) {
  ControlBasis out;
  if (fixed.empty()) {
    out.vectors = identity(d);
    for (std::size_t k = 0; k < d; ++k) out.units.push_back({k});
    return out;
  }
  for (std::size_t a = 0; a < fixed.size() && out.commuting; ++a) {
    for (std::size_t b = a + 1; b < fixed.size(); ++b) {
      const double scale = std::max(1.0, fixed[a].norm() * fixed[b].norm());
      if (operator_norm(commutator(fixed[a].matrix(), fixed[b].matrix())) > tol.commute_tol * scale) {
        out.commuting = false;
        break;
      }
    }
  }

  if (out.commuting) {
    ComplexMatrix combo = fixed[0].matrix();
    for (std::size_t k = 1; k < fixed.size(); ++k) combo += detail::generic_weight(k) * fixed[k].matrix();
    const Eigensystem es = hermitian_eigensystem(HermitianOperator(combo, tol));
    out.vectors = es.vectors;
    // Joint eigenvalue tuples; neighbours in sorted order with equal tuples share a unit.
    for (std::size_t c = 0; c < d; ++c) {
      bool same = !out.units.empty();
      if (same) {
        const auto prev = static_cast<Eigen::Index>(out.units.back().front());
        for (const auto& f : fixed) {
          const double scale = std::max(1.0, f.norm());
          const Complex lp = es.vectors.col(prev).dot(f.matrix() * es.vectors.col(prev));
          const auto cc = static_cast<Eigen::Index>(c);
          const Complex lc = es.vectors.col(cc).dot(f.matrix() * es.vectors.col(cc));
          if (std::abs(lp - lc) > tol.degeneracy_tol * scale) {
            same = false;
            break;
          }
        }
      }
      if (same) {
        out.units.back().push_back(c);
      } else {
        out.units.push_back({c});
      }
    }
    return out;
  }

  const auto comm = original_space_commutant(fixed, tol);
  if (comm.size() < 2) {
    out.vectors = identity(d);
    out.units.emplace_back();
    for (std::size_t k = 0; k < d; ++k) out.units.back().push_back(k);
    return out;
  }
  ComplexMatrix generic = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t k = 1; k < comm.size(); ++k) generic += detail::generic_weight(k) * comm[k];
  const Eigensystem es = hermitian_eigensystem(HermitianOperator(generic, tol));
  out.vectors = es.vectors;
  const double spread = std::max(1.0, es.values.cwiseAbs().maxCoeff());
  out.units = detail::group_sorted(es.values, tol.degeneracy_tol * spread);
  return out;
}

struct ControlBasisGraph {
  ControlBasis basis;
  WeightedGraph graph;
  /// Basis columns belonging to each vertex.
  std::vector<std::vector<std::size_t>> vertices;
};

/// Coupling graph of `op` in the basis adapted to `fixed`:
/// weight(u, v) = sum of |<a|op|b>| over a in u, b in v.
inline ControlBasisGraph build_control_basis_graph(const HermitianOperator& op,
                                                   std::span<const HermitianOperator> fixed,
                                                   const ToleranceConfig& tol = {}) {
  ControlBasisGraph out;
  out.basis = control_basis(fixed, op.dim(), tol);
  if (out.basis.commuting) {
    for (std::size_t k = 0; k < op.dim(); ++k) out.vertices.push_back({k});
  } else {
    out.vertices = out.basis.units;
  }
  const ComplexMatrix in_basis = out.basis.vectors.adjoint() * op.matrix() * out.basis.vectors;
  const auto nv = static_cast<Eigen::Index>(out.vertices.size());
  out.graph.weights = Eigen::MatrixXd::Zero(nv, nv);
  for (Eigen::Index u = 0; u < nv; ++u) {
    for (Eigen::Index v = 0; v < nv; ++v) {
      if (u == v) continue;
      double w = 0.0;
      for (std::size_t a : out.vertices[static_cast<std::size_t>(u)]) {
        for (std::size_t b : out.vertices[static_cast<std::size_t>(v)]) {
          w += std::abs(in_basis(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        }
      }
      out.graph.weights(u, v) = w;
    }
  }
  // Exact symmetry for the cut routine.
  out.graph.weights = 0.5 * (out.graph.weights + out.graph.weights.transpose()).eval();
  return out;
}

inline ControlBasisGraph build_control_basis_graph(const HermitianOperator& drift,
                                                   const HermitianOperator& control,
                                                   const ToleranceConfig& tol = {}) {
  const std::array<HermitianOperator, 1> fixed{control};
  return build_control_basis_graph(drift, fixed, tol);
}

namespace detail {

inline ComplexMatrix projector_on(const ComplexMatrix& vectors, const std::vector<std::size_t>& cols) {
  ComplexMatrix p = ComplexMatrix::Zero(vectors.rows(), vectors.rows());
  for (std::size_t c : cols) {
    const auto col = vectors.col(static_cast<Eigen::Index>(c));
    p += col * col.adjoint();
  }
  return p;
}

// -(P A Q + Q A P): removes every coupling of `a` across the split P + Q = 1.
inline ComplexMatrix cross_block_removal(const ComplexMatrix& a, const ComplexMatrix& p) {
  const ComplexMatrix q = identity(static_cast<std::size_t>(a.rows())) - p;
  return -(p * a * q + q * a * p);
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Upper-bound estimators. Each perturbs generator `target` of `generators`
// and keeps the others fixed.

/// Shifts the two closest eigenvalues of the target towards their midpoint by
/// g/2 each, making them degenerate. The norm of the shift is g/2.
inline DistanceCertificate epsilon_upper_gap_merge(std::span<const HermitianOperator> generators,
                                                   std::size_t target, const ToleranceConfig& tol = {}) {
  tol.validate();
  if (target >= generators.size()) throw InputError("gap_merge: target index out of range");
  const HermitianOperator& op = generators[target];
  const std::size_t d = op.dim();
  if (d < 2) throw InputError("gap_merge: dimension must be at least 2");

  const Eigensystem es = hermitian_eigensystem(op);
  Eigen::Index k_min = 0;
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k + 1 < es.values.size(); ++k) {
    const double gap = es.values(k + 1) - es.values(k);
    if (gap < g) {
      g = gap;
      k_min = k;
    }
  }

  DistanceCertificate cert;
  cert.method = DistanceMethod::gap_merge;
  if (g <= tol.degeneracy_tol * std::max(1.0, op.norm())) {
    cert.degenerate = true;
    cert.perturbation.push_back({target, HermitianOperator::zero(d)});
  } else {
    const auto lo = es.vectors.col(k_min);
    const auto hi = es.vectors.col(k_min + 1);
    const ComplexMatrix delta = 0.5 * g * (lo * lo.adjoint() - hi * hi.adjoint());
    cert.perturbation.push_back({target, HermitianOperator(delta, tol)});
  }
  detail::finalize_certificate(cert, generators, tol);
  return cert;
}

inline DistanceCertificate epsilon_upper_gap_merge(const HermitianOperator& drift,
                                                   const HermitianOperator& control,
                                                   const ToleranceConfig& tol = {}) {
  const std::array<HermitianOperator, 2> gens{drift, control};
  return epsilon_upper_gap_merge(gens, 0, tol);
}

/// Removes the minimum-weight cut of the target's coupling graph in the
/// fixed generators' eigenbasis. The perturbed target is block diagonal and
/// the block projector commutes with every generator. Absent when the graph
/// has a single vertex.
inline std::optional<DistanceCertificate> epsilon_upper_min_cut(std::span<const HermitianOperator> generators,
                                                                std::size_t target,
                                                                const ToleranceConfig& tol = {}) {
  tol.validate();
  const auto fixed = detail::others(generators, target);
  const HermitianOperator& op = generators[target];
  const ControlBasisGraph cbg = build_control_basis_graph(op, fixed, tol);
  if (cbg.graph.size() < 2) return std::nullopt;

  const CutResult cut = stoer_wagner_min_cut(cbg.graph);
  std::vector<std::size_t> cols;
  for (std::size_t v : cut.side_a) {
    cols.insert(cols.end(), cbg.vertices[v].begin(), cbg.vertices[v].end());
  }
  const ComplexMatrix p = detail::projector_on(cbg.basis.vectors, cols);
  const std::size_t d = op.dim();

  DistanceCertificate cert;
  cert.method = DistanceMethod::min_cut;
  if (cut.cut_weight == 0.0) {
    cert.perturbation.push_back({target, HermitianOperator::zero(d)});
  } else {
    cert.perturbation.push_back({target, HermitianOperator(detail::cross_block_removal(op.matrix(), p), tol)});
  }
  detail::finalize_certificate(cert, generators, tol, HermitianOperator(p, tol));
  // Report the L_{1,1} norm in the control basis, where it equals twice the cut weight.
  const ComplexMatrix delta_cb =
      cbg.basis.vectors.adjoint() * cert.perturbation.front().delta.matrix() * cbg.basis.vectors;
  cert.l11_norm = l11_norm(delta_cb);
  return cert;
}

inline DistanceCertificate epsilon_upper_min_cut(const HermitianOperator& drift, const HermitianOperator& control,
                                                 const ToleranceConfig& tol = {}) {
  const std::array<HermitianOperator, 2> gens{drift, control};
  auto cert = epsilon_upper_min_cut(gens, 0, tol);
  if (!cert) throw InputError("min_cut: coupling graph has a single vertex");
  return *cert;
}

/// Largest dimension for the exhaustive block search.
inline constexpr std::size_t kBlockSearchMaxDim = 12;

/// Exhaustive search over unions of indivisible units of the fixed generators'
/// basis for the split whose cross-block removal has the smallest operator
/// norm. With a single unit the only option left is removing the target.
inline DistanceCertificate epsilon_upper_block_search(std::span<const HermitianOperator> generators,
                                                      std::size_t target, const ToleranceConfig& tol = {}) {
  tol.validate();
  const auto fixed = detail::others(generators, target);
  const HermitianOperator& op = generators[target];
  const std::size_t d = op.dim();
  if (d > kBlockSearchMaxDim) {
    throw GuardError("block_search: d = " + std::to_string(d) + " exceeds " +
                     std::to_string(kBlockSearchMaxDim) + "; use the min-cut estimator");
  }
  const ControlBasis basis = control_basis(fixed, d, tol);

  DistanceCertificate cert;
  cert.method = DistanceMethod::block_search;
  const std::size_t units = basis.units.size();
  if (units < 2) {
    cert.perturbation.push_back({target, -op});
    detail::finalize_certificate(cert, generators, tol);
    return cert;
  }

  double best = std::numeric_limits<double>::infinity();
  ComplexMatrix best_delta;
  ComplexMatrix best_p;
  const std::size_t last = units - 1;  // always on the complement side
  for (std::size_t mask = 1; mask < (std::size_t{1} << last); ++mask) {
    std::vector<std::size_t> cols;
    for (std::size_t u = 0; u < last; ++u) {
      if (mask & (std::size_t{1} << u)) cols.insert(cols.end(), basis.units[u].begin(), basis.units[u].end());
    }
    const ComplexMatrix p = detail::projector_on(basis.vectors, cols);
    const ComplexMatrix delta = detail::cross_block_removal(op.matrix(), p);
    const double n = operator_norm(delta);
    if (n < best) {
      best = n;
      best_delta = delta;
      best_p = p;
    }
  }
  cert.perturbation.push_back({target, HermitianOperator(best_delta, tol)});
  detail::finalize_certificate(cert, generators, tol, HermitianOperator(best_p, tol));
  return cert;
}

inline DistanceCertificate epsilon_upper_block_search(const HermitianOperator& drift,
                                                      const HermitianOperator& control,
                                                      const ToleranceConfig& tol = {}) {
  const std::array<HermitianOperator, 2> gens{drift, control};
  return epsilon_upper_block_search(gens, 0, tol);
}

/// Delta = -target. For a drift/single-control pair the result (0, H_c) has a
/// one-dimensional algebra, so this always verifies there.
inline DistanceCertificate epsilon_upper_drift_removal(std::span<const HermitianOperator> generators,
                                                       std::size_t target, const ToleranceConfig& tol = {}) {
  if (target >= generators.size()) throw InputError("drift_removal: target index out of range");
  DistanceCertificate cert;
  cert.method = DistanceMethod::drift_removal;
  cert.perturbation.push_back({target, -generators[target]});
  detail::finalize_certificate(cert, generators, tol);
  return cert;
}

inline DistanceCertificate epsilon_upper_drift_removal(const HermitianOperator& drift,
                                                       const HermitianOperator& control,
                                                       const ToleranceConfig& tol = {}) {
  const std::array<HermitianOperator, 2> gens{drift, control};
  return epsilon_upper_drift_removal(gens, 0, tol);
}

// ----------------------------------------------------------------------------
// Lower bound

namespace detail {

inline double lower_from_spectrum(const RankResult& rr, std::size_t d, std::size_t movable) {
  const std::size_t n = d * d * d * d;
  if (rr.rank != n - 2) {
    throw VerdictError("epsilon_lower_svd: system is not controllable (commutant nullity " +
                       std::to_string(rr.nullity) + "); the distance is zero");
  }
  return rr.singular_values(static_cast<Eigen::Index>(n - 3)) / (4.0 * static_cast<double>(movable));
}

}  // namespace detail

/// sigma / (4 m) with sigma the (d^4 - 2)-th singular value of the stacked
/// adjoint matrix and m the number of generators allowed to move.
///
/// Perturbing generator k by Delta changes its block by (i Delta^(2))^(ad),
/// whose norm is at most 4 ||Delta||; the stacked change is then at most
/// 4 m max_j ||Delta_j||. Losing rank below d^4 - 2 needs that change to
/// reach sigma (Weyl), so every uncontrollable perturbation has
/// max_j ||Delta_j|| >= sigma / (4 m).
inline double epsilon_lower_svd(std::span<const HermitianOperator> generators,
                                std::span<const std::size_t> perturbed_indices,
                                const ToleranceConfig& tol = {}, bool force = false) {
  tol.validate();
  const std::size_t d = detail::common_dim(generators, "epsilon_lower_svd");
  if (d < 2) throw InputError("epsilon_lower_svd: dimension must be at least 2");
  if (perturbed_indices.empty()) throw InputError("epsilon_lower_svd: no perturbed generators");
  for (std::size_t k : perturbed_indices) {
    if (k >= generators.size()) throw InputError("epsilon_lower_svd: generator index out of range");
  }
  if (d > kCommutantMaxDim && !force) {
    throw GuardError("epsilon_lower_svd: d = " + std::to_string(d) + " too large without force");
  }
  const RankResult rr = stacked_adjoint_rank(generators, tol, false);
  return detail::lower_from_spectrum(rr, d, perturbed_indices.size());
}

// ----------------------------------------------------------------------------
// Aggregation over a ControlSystem

/// Which generators a distance estimate may perturb.
struct PerturbSelector {
  enum class Kind { drift, control, all };
  Kind kind = Kind::drift;
  /// Control index (pulse order: bounded then unbounded) when kind == control.
  std::size_t control = 0;

  /// "drift", "control:<k>" or "all".
  static PerturbSelector parse(const std::string& s) {
    if (s == "drift") return {Kind::drift, 0};
    if (s == "all") return {Kind::all, 0};
    const std::string prefix = "control:";
    if (s.rfind(prefix, 0) == 0) {
      try {
        std::size_t pos = 0;
        const auto k = std::stoul(s.substr(prefix.size()), &pos);
        if (pos == s.size() - prefix.size()) return {Kind::control, k};
      } catch (const std::exception&) {
      }
    }
    throw InputError("bad perturbation selector '" + s + "' (expected drift, control:<k> or all)");
  }

  std::vector<std::size_t> flat_indices(const ControlSystem& system) const {
    switch (kind) {
      case Kind::drift:
        if (!system.drift()) throw InputError("system has no drift to perturb");
        return {0};
      case Kind::control:
        if (control >= system.control_count()) throw InputError("control index out of range");
        return {(system.drift() ? 1 : 0) + control};
      case Kind::all: {
        std::vector<std::size_t> out;
        if (system.drift()) out.push_back(0);
        for (std::size_t j = 0; j < system.bounded().size(); ++j) out.push_back(system.bounded_index(j));
        if (out.empty()) throw InputError("system has no drift or bounded generators to perturb");
        return out;
      }
    }
    return {};
  }
};

struct MethodSet {
  bool gap = true;
  bool cut = true;
  bool block = true;
  bool removal = true;

  /// Comma-separated subset of gap,cut,block,removal.
  static MethodSet parse(const std::string& s) {
    MethodSet m{false, false, false, false};
    std::size_t start = 0;
    while (start <= s.size()) {
      const auto end = s.find(',', start);
      const std::string tok = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (tok == "gap") m.gap = true;
      else if (tok == "cut") m.cut = true;
      else if (tok == "block") m.block = true;
      else if (tok == "removal") m.removal = true;
      else throw InputError("unknown estimator '" + tok + "' (expected gap, cut, block, removal)");
      if (end == std::string::npos) break;
      start = end + 1;
    }
    return m;
  }
};

struct DistanceEstimate {
  DistanceCertificate upper;
  /// Absent when the SVD is above the size guard.
  std::optional<double> lower;
  std::vector<DistanceCertificate> candidates;
  std::vector<std::size_t> perturbable;
};

/// Runs every selected estimator on every perturbable generator (fixed order),
/// plus the joint removal when several generators may move, and returns the
/// verified certificate with the smallest effective epsilon together with the
/// singular-value lower bound: lower <= eps* <= upper.op_norm.
inline DistanceEstimate epsilon_best(const ControlSystem& system, const PerturbSelector& selector = {},
                                     const MethodSet& methods = {}, const ToleranceConfig& tol = {}) {
  tol.validate();
  const auto gens = system.generators();
  const std::size_t d = system.dim();
  // One stacked SVD serves both the verdict and the lower bound.
  std::optional<RankResult> stacked;
  bool controllable = false;
  if (d <= kCommutantMaxDim) {
    stacked = stacked_adjoint_rank(gens, tol, false);
    controllable = stacked->nullity == 2;
    if (d <= 4) {
      const auto shifted = system.traceless_generators();
      if ((lie_dimension(shifted, tol).dimension == d * d - 1) != controllable) {
        throw NumericalError("controllability tests disagree on the input system");
      }
    }
  } else {
    controllable = decide_controllability(system, tol).controllable;
  }
  if (!controllable) {
    throw VerdictError("system is not fully controllable; its distance to uncontrollability is zero");
  }
  DistanceEstimate out;
  out.perturbable = selector.flat_indices(system);

  for (std::size_t t : out.perturbable) {
    if (methods.gap && system.dim() >= 2) out.candidates.push_back(epsilon_upper_gap_merge(gens, t, tol));
    if (methods.cut) {
      if (auto c = epsilon_upper_min_cut(gens, t, tol)) out.candidates.push_back(std::move(*c));
    }
    if (methods.block && system.dim() <= kBlockSearchMaxDim) {
      out.candidates.push_back(epsilon_upper_block_search(gens, t, tol));
    }
    if (methods.removal) out.candidates.push_back(epsilon_upper_drift_removal(gens, t, tol));
  }
  if (out.perturbable.size() > 1 && methods.removal) {
    DistanceCertificate joint;
    joint.method = DistanceMethod::drift_removal;
    for (std::size_t t : out.perturbable) joint.perturbation.push_back({t, -gens[t]});
    detail::finalize_certificate(joint, gens, tol);
    out.candidates.push_back(std::move(joint));
  }

  const DistanceCertificate* best = nullptr;
  for (const auto& c : out.candidates) {
    if (!c.verified_uncontrollable) continue;
    if (!best || c.effective_epsilon() < best->effective_epsilon()) best = &c;
  }
  if (!best) {
    for (std::size_t t : out.perturbable) {
      auto fallback = epsilon_upper_drift_removal(gens, t, tol);
      if (fallback.verified_uncontrollable) {
        out.candidates.push_back(std::move(fallback));
        best = &out.candidates.back();
        break;
      }
    }
  }
  if (!best) {
    throw VerdictError("no perturbation of the selected generators renders the system uncontrollable; "
                       "the fixed generators are controllable on their own");
  }
  out.upper = *best;
  if (stacked) out.lower = detail::lower_from_spectrum(*stacked, d, out.perturbable.size());
  return out;
}

}  // namespace qdist
