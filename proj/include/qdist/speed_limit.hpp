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

// speed_limit.hpp: control-time lower bounds T* >= delta / (c * eps) from a
// verified distance certificate, plus the piecewise-constant propagator used
// to check the perturbation inequality numerically.
//
// Sign convention: dU/dt = +i H(t) U, so a segment of duration dt with
// Hamiltonian H contributes exp(+i H dt).

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "qdist/commutant.hpp"
#include "qdist/control_system.hpp"
#include "qdist/distance.hpp"
#include "qdist/linalg.hpp"

namespace qdist {

/// Any strict reachable subgroup leaves some target at distance >= 1/4.
inline constexpr double kDeltaUniversal = 0.25;
/// With a symmetry projector on the original space the floor is sqrt(2).
inline const double kDeltaSymmetry = std::sqrt(2.0);

enum class DeltaProvenance { universal_quarter, symmetry_sqrt2 };

inline std::string to_string(DeltaProvenance p) {
  return p == DeltaProvenance::symmetry_sqrt2 ? "symmetry_sqrt2" : "universal_quarter";
}

struct DeltaBound {
  double value = kDeltaUniversal;
  DeltaProvenance provenance = DeltaProvenance::universal_quarter;
};

struct SpeedLimitReport {
  double epsilon_upper = 0.0;
  std::optional<double> epsilon_lower;
  double effective_epsilon = 0.0;
  double delta_lower = kDeltaUniversal;
  DeltaProvenance delta_provenance = DeltaProvenance::universal_quarter;
  double amplitude_cap_c = 1.0;
  double t_star_lower = 0.0;
  DistanceCertificate certificate;
};

/// sqrt(2) if the certificate carries a non-scalar witness that commutes with
/// every perturbed generator to commute_tol; 1/4 otherwise.
inline DeltaBound delta_lower_bound(const ControlSystem& system, const DistanceCertificate& cert,
                                    const ToleranceConfig& tol = {}) {
  if (!cert.verified_uncontrollable) {
    throw InputError("delta_lower_bound: certificate is not verified uncontrollable");
  }
  if (!cert.symmetry_witness) return {};
  const ComplexMatrix& w = cert.symmetry_witness->matrix();
  const ComplexMatrix scalar_part =
      (w.trace() / static_cast<double>(w.rows())) * identity(static_cast<std::size_t>(w.rows()));
  if (operator_norm(w - scalar_part) <= tol.commute_tol * std::max(1.0, operator_norm(w))) return {};
  const auto gens = system.generators();
  const auto perturbed = apply_perturbation(gens, cert);
  if (commutation_residual(w, perturbed) > tol.commute_tol) return {};
  return {kDeltaSymmetry, DeltaProvenance::symmetry_sqrt2};
}

/// delta / (c * eps). Zero or non-finite inputs are rejected.
inline double t_star_from_epsilon(double delta, double cap, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InputError("t_star: effective epsilon must be positive and finite");
  }
  if (!(cap > 0.0) || !std::isfinite(cap)) throw InputError("t_star: amplitude cap must be positive and finite");
  return delta / (cap * epsilon);
}

/// c = largest cap among perturbed generators (the drift counts as cap 1);
/// eps_eff = M * max_j ||Delta_j||.
inline SpeedLimitReport t_star_lower(const ControlSystem& system, const DistanceCertificate& cert,
                                     const DeltaBound& delta) {
  if (!cert.verified_uncontrollable) {
    throw InputError("t_star_lower: certificate is not verified uncontrollable");
  }
  if (cert.perturbation.empty()) throw InputError("t_star_lower: empty certificate");
  SpeedLimitReport r;
  r.certificate = cert;
  r.epsilon_upper = cert.op_norm;
  r.effective_epsilon = cert.effective_epsilon();
  r.delta_lower = delta.value;
  r.delta_provenance = delta.provenance;
  double c = 0.0;
  for (const auto& p : cert.perturbation) {
    const GeneratorRole role = system.role(p.generator);
    if (role.kind == GeneratorKind::unbounded) {
      throw InputError("t_star_lower: certificate perturbs an unbounded control; no finite amplitude cap");
    }
    c = std::max(c, role.cap);
  }
  r.amplitude_cap_c = c;
  r.t_star_lower = t_star_from_epsilon(r.delta_lower, c, r.effective_epsilon);
  return r;
}

// ----------------------------------------------------------------------------
// Piecewise-constant pulses

struct PiecewisePulse {
  std::vector<double> durations;
  /// amplitudes[segment][control], controls in order bounded..., unbounded...
  std::vector<std::vector<double>> amplitudes;

  double total_duration() const {
    double t = 0.0;
    for (double d : durations) t += d;
    return t;
  }

  void validate(const ControlSystem& system) const {
    if (durations.empty()) throw InputError("pulse: no segments");
    if (amplitudes.size() != durations.size()) {
      throw InputError("pulse: " + std::to_string(durations.size()) + " durations but " +
                       std::to_string(amplitudes.size()) + " amplitude rows");
    }
    for (std::size_t s = 0; s < durations.size(); ++s) {
      if (!(durations[s] > 0.0) || !std::isfinite(durations[s])) {
        throw InputError("pulse: segment " + std::to_string(s) + " has non-positive duration");
      }
      if (amplitudes[s].size() != system.control_count()) {
        throw InputError("pulse: segment " + std::to_string(s) + " has " +
                         std::to_string(amplitudes[s].size()) + " amplitudes, system has " +
                         std::to_string(system.control_count()) + " controls");
      }
      for (std::size_t j = 0; j < amplitudes[s].size(); ++j) {
        const double a = amplitudes[s][j];
        if (!std::isfinite(a)) throw InputError("pulse: non-finite amplitude");
        if (j < system.bounded().size() && std::abs(a) > system.bounded()[j].cap) {
          throw InputError("pulse: segment " + std::to_string(s) + " exceeds the cap of bounded control " +
                           std::to_string(j));
        }
      }
    }
  }
};

/// Hamiltonian of one segment: drift + sum_j a_j G_j.
inline ComplexMatrix segment_hamiltonian(const ControlSystem& system, const std::vector<double>& amps) {
  const auto d = static_cast<Eigen::Index>(system.dim());
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  if (system.drift()) h += system.drift()->matrix();
  for (std::size_t j = 0; j < system.bounded().size(); ++j) h += amps[j] * system.bounded()[j].op.matrix();
  for (std::size_t k = 0; k < system.unbounded().size(); ++k) {
    h += amps[system.bounded().size() + k] * system.unbounded()[k].matrix();
  }
  return h;
}

/// U(T) = exp(i H_n dt_n) ... exp(i H_1 dt_1).
inline ComplexMatrix evolve(const ControlSystem& system, const PiecewisePulse& pulse) {
  pulse.validate(system);
  ComplexMatrix u = identity(system.dim());
  for (std::size_t s = 0; s < pulse.durations.size(); ++s) {
    const HermitianOperator h(segment_hamiltonian(system, pulse.amplitudes[s]));
    u = expi(h, pulse.durations[s]) * u;
  }
  return u;
}

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// ||U_perturbed - U|| <= sum_s dt_s sum_j |a_{s,j}| ||Delta_j|| (drift amplitude 1).
inline InequalityCheck verify_perturbation_inequality(const ControlSystem& system,
                                                      const DistanceCertificate& cert,
                                                      const PiecewisePulse& pulse) {
  const ControlSystem perturbed = apply_certificate(system, cert);
  InequalityCheck out;
  out.lhs = operator_norm(evolve(perturbed, pulse) - evolve(system, pulse));
  for (std::size_t s = 0; s < pulse.durations.size(); ++s) {
    double rate = 0.0;
    for (const auto& p : cert.perturbation) {
      const GeneratorRole role = system.role(p.generator);
      double amp = 1.0;
      if (role.kind == GeneratorKind::bounded) amp = pulse.amplitudes[s][role.local_index];
      if (role.kind == GeneratorKind::unbounded) {
        amp = pulse.amplitudes[s][system.bounded().size() + role.local_index];
      }
      rate += std::abs(amp) * p.delta.norm();
    }
    out.rhs += pulse.durations[s] * rate;
  }
  out.holds = out.lhs <= out.rhs + 1e-9;
  return out;
}

/// Random pulse respecting caps; unbounded amplitudes are N(0, unbounded_scale).
inline PiecewisePulse random_pulse(const ControlSystem& system, std::size_t segments, std::uint64_t seed,
                                   double max_duration = 1.0, double unbounded_scale = 2.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dur(0.05 * max_duration, max_duration);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, unbounded_scale);
  PiecewisePulse p;
  for (std::size_t s = 0; s < segments; ++s) {
    p.durations.push_back(dur(rng));
    std::vector<double> row;
    for (const auto& b : system.bounded()) row.push_back(b.cap * unit(rng));
    for (std::size_t k = 0; k < system.unbounded().size(); ++k) row.push_back(normal(rng));
    p.amplitudes.push_back(std::move(row));
  }
  return p;
}

// ----------------------------------------------------------------------------
// Reachable-set probe

struct ProbeResult {
  /// sqrt(2) when a symmetry projector P of the system has a state in its
  /// range (or in its kernel) that the target sends into the complement.
  std::optional<double> certified_floor;
  /// Heuristic: min over sampled pulses of ||evolve - target||. An upper
  /// estimate of the best approximation of this target, not a bound on delta.
  double sampled_min = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
};

namespace detail {

// True iff some unit vector in span(cols of `range`) is mapped by `u` to the
// orthogonal complement of that span.
inline bool maps_into_complement(const ComplexMatrix& u, const ComplexMatrix& range) {
  if (range.cols() == 0) return false;
  const ComplexMatrix block = range.adjoint() * u * range;
  const RealVector s = singular_values(block);
  return s(s.size() - 1) <= 1e-9;
}

}  // namespace detail

inline ProbeResult reachable_distance_probe(const ControlSystem& system, const ComplexMatrix& target,
                                            std::size_t sample_budget, std::uint64_t seed = 1,
                                            const ToleranceConfig& tol = {}) {
  require_square(target, "reachable_distance_probe");
  if (static_cast<std::size_t>(target.rows()) != system.dim()) {
    throw InputError("reachable_distance_probe: target dimension mismatch");
  }
  if (decide_controllability(system, tol).controllable) {
    throw VerdictError("reachable_distance_probe: system is controllable; every target is reachable");
  }
  ProbeResult out;
  const auto gens = system.generators();
  if (auto sym = extract_original_space_symmetry(gens, tol)) {
    const Eigensystem es = hermitian_eigensystem(*sym);
    const auto groups = detail::group_sorted(es.values, tol.degeneracy_tol * std::max(1.0, sym->norm()));
    for (const auto& g : groups) {
      ComplexMatrix range(es.vectors.rows(), static_cast<Eigen::Index>(g.size()));
      for (std::size_t k = 0; k < g.size(); ++k) range.col(static_cast<Eigen::Index>(k)) = es.vectors.col(static_cast<Eigen::Index>(g[k]));
      if (detail::maps_into_complement(target, range)) {
        out.certified_floor = kDeltaSymmetry;
        break;
      }
    }
  }
  for (std::size_t k = 0; k < sample_budget; ++k) {
    const PiecewisePulse p = random_pulse(system, 10, seed + 7919 * k);
    out.sampled_min = std::min(out.sampled_min, operator_norm(evolve(system, p) - target));
    ++out.samples;
  }
  return out;
}

}  // namespace qdist
