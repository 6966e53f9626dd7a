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

// commands.hpp: the qdist subcommands as plain functions returning a JSON
// report and an exit code, so tests can drive them without a subprocess.

#pragma once

#include <cstdlib>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qdist/qdist.hpp"

namespace qdist::cli {

enum ExitCode : int { kOk = 0, kInput = 1, kVerdict = 2, kGuard = 3, kNumerical = 4 };

struct CommandResult {
  Json report;
  int exit_code = kOk;
};

// ----------------------------------------------------------------------------
// Tolerances: defaults < config file < QDIST_TOL_RANK < explicit flags.

struct ToleranceFlags {
  std::string config;
  std::optional<double> hermiticity_tol;
  std::optional<double> trace_tol;
  std::optional<double> rank_rel_tol;
  std::optional<double> commute_tol;
  std::optional<double> degeneracy_tol;
};

inline ToleranceConfig resolve_tolerances(const ToleranceFlags& flags) {
  ToleranceConfig t;
  if (!flags.config.empty()) t = tolerances_from_json(read_json_file(flags.config), t, flags.config);
  if (const char* env = std::getenv("QDIST_TOL_RANK"); env && *env) {
    const std::string s(env);
    try {
      std::size_t pos = 0;
      t.rank_rel_tol = std::stod(s, &pos);
      if (pos != s.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError("QDIST_TOL_RANK: not a number: '" + s + "'");
    }
  }
  if (flags.hermiticity_tol) t.hermiticity_tol = *flags.hermiticity_tol;
  if (flags.trace_tol) t.trace_tol = *flags.trace_tol;
  if (flags.rank_rel_tol) t.rank_rel_tol = *flags.rank_rel_tol;
  if (flags.commute_tol) t.commute_tol = *flags.commute_tol;
  if (flags.degeneracy_tol) t.degeneracy_tol = *flags.degeneracy_tol;
  t.validate();
  return t;
}

// ----------------------------------------------------------------------------
// Output

/// Flattens a report into "path  value" lines. Leaves are printed with the
/// same serializer as the JSON output, so both carry identical numbers.
inline void flatten(const Json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  auto scalar_array = [](const Json& a) {
    for (const auto& e : a) {
      if (e.is_structured()) return false;
    }
    return true;
  };
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
  } else if (j.is_array() && !j.empty() && !scalar_array(j)) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(path, j.dump());
  }
}

inline std::string render(const Json& report, bool pretty) {
  if (!pretty) return report.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  std::ostringstream os;
  for (const auto& [k, v] : rows) os << std::left << std::setw(static_cast<int>(width) + 2) << k << v << '\n';
  return os.str();
}

// ----------------------------------------------------------------------------
// Shared pieces

inline ControlSystem load_system(const std::string& path, const ToleranceConfig& tol) {
  return system_from_json(read_json_file(path), tol);
}

inline Json system_summary(const ControlSystem& s) {
  Json caps = Json::array();
  for (const auto& b : s.bounded()) caps.push_back(b.cap);
  return Json{{"dim", s.dim()},
              {"generator_count", s.generator_count()},
              {"has_drift", s.drift().has_value()},
              {"bounded_caps", caps},
              {"unbounded_count", s.unbounded().size()}};
}

inline Json lie_summary(const LieClosureResult& r, std::size_t d) {
  return Json{{"dimension", r.dimension},
              {"target", d * d - 1},
              {"depth", r.depth},
              {"converged", r.converged},
              {"controllable", r.dimension == d * d - 1}};
}

inline Json commutant_summary(const CommutantResult& r, std::size_t d) {
  return Json{{"rank", r.rank},
              {"target_rank", d * d * d * d - 2},
              {"nullity", r.nullity},
              {"controllable", r.controllable}};
}

inline Json candidate_summary(const DistanceCertificate& c) {
  Json gens = Json::array();
  for (const auto& p : c.perturbation) gens.push_back(p.generator);
  return Json{{"method", to_string(c.method)},
              {"generators", gens},
              {"op_norm", c.op_norm},
              {"effective_epsilon", c.effective_epsilon()},
              {"verified_uncontrollable", c.verified_uncontrollable}};
}

inline Json distance_json(const DistanceEstimate& e) {
  Json cands = Json::array();
  for (const auto& c : e.candidates) cands.push_back(candidate_summary(c));
  return Json{{"upper", to_json(e.upper)},
              {"lower", e.lower ? Json(*e.lower) : Json(nullptr)},
              {"perturbable", e.perturbable},
              {"candidates", cands}};
}

// ----------------------------------------------------------------------------
// Subcommands

struct ModelArgs {
  std::string name;
  std::vector<std::string> params;
  bool reference = false;
};

inline CommandResult cmd_model(const ModelArgs& a) {
  ModelSpec spec;
  spec.name = model_name_from_string(a.name);
  for (const auto& p : a.params) spec.set(p);
  const ControlSystem system = build_model(spec);
  Json j = to_json(system);
  j["name"] = to_string(spec.name);
  if (a.reference) j["reference"] = reference_bounds(spec);
  return {j, kOk};
}

inline CommandResult cmd_lie(const ControlSystem& system, const ToleranceConfig& tol) {
  const auto gens = system.traceless_generators();
  const auto r = lie_dimension(gens, tol);
  Json j = lie_summary(r, system.dim());
  j["tolerances"] = to_json(tol);
  if (!r.converged) return {j, kNumerical};
  return {j, r.dimension == system.dim() * system.dim() - 1 ? kOk : kVerdict};
}

struct CommutantArgs {
  bool force = false;
  std::string emit_symmetries;
};

inline CommandResult cmd_commutant(const ControlSystem& system, const CommutantArgs& a, const ToleranceConfig& tol) {
  const auto gens = system.traceless_generators();
  const auto r = commutant_dimension(gens, tol, {.force = a.force, .want_symmetries = !a.emit_symmetries.empty()});
  Json j = commutant_summary(r, system.dim());
  if (!a.emit_symmetries.empty()) {
    Json syms = Json::array();
    for (const auto& s : r.symmetry_basis) syms.push_back(to_json(s));
    write_json_file(a.emit_symmetries, Json{{"space", "doubled"}, {"dim", system.dim() * system.dim()}, {"symmetries", syms}});
    j["symmetries_written"] = a.emit_symmetries;
  }
  j["tolerances"] = to_json(tol);
  return {j, r.controllable ? kOk : kVerdict};
}

struct DistanceArgs {
  std::string perturb = "drift";
  std::string methods = "gap,cut,block,removal";
};

inline CommandResult cmd_distance(const ControlSystem& system, const DistanceArgs& a, const ToleranceConfig& tol) {
  const auto est = epsilon_best(system, PerturbSelector::parse(a.perturb), MethodSet::parse(a.methods), tol);
  Json j = distance_json(est);
  j["tolerances"] = to_json(tol);
  return {j, kOk};
}

/// Re-verifies a stored certificate and recomputes its norms.
inline DistanceCertificate checked_certificate(const ControlSystem& system, DistanceCertificate cert,
                                               const ToleranceConfig& tol) {
  for (const auto& p : cert.perturbation) {
    system.role(p.generator);
    if (p.delta.dim() != system.dim()) throw InputError("certificate: perturbation dimension mismatch");
  }
  const auto gens = system.generators();
  auto hint = cert.symmetry_witness;
  detail::finalize_certificate(cert, gens, tol, std::move(hint));
  if (!cert.verified_uncontrollable) {
    throw InputError("certificate: perturbed system is still controllable");
  }
  return cert;
}

struct QslArgs {
  std::string cert;
  std::string perturb = "drift";
};

inline CommandResult cmd_qsl(const ControlSystem& system, const QslArgs& a, const ToleranceConfig& tol) {
  std::optional<double> lower;
  DistanceCertificate cert;
  if (!a.cert.empty()) {
    cert = checked_certificate(system, certificate_from_json(read_json_file(a.cert), tol), tol);
  } else {
    auto est = epsilon_best(system, PerturbSelector::parse(a.perturb), {}, tol);
    cert = std::move(est.upper);
    lower = est.lower;
  }
  SpeedLimitReport r = t_star_lower(system, cert, delta_lower_bound(system, cert, tol));
  r.epsilon_lower = lower;
  Json j = to_json(r);
  j["tolerances"] = to_json(tol);
  return {j, kOk};
}

struct AnalyzeArgs {
  bool skip_commutant = false;
  bool force = false;
  std::string perturb = "drift";
  std::uint64_t seed = 1;
};

inline constexpr const char* kToolName = "qdist";

inline CommandResult cmd_analyze(const ControlSystem& system, const AnalyzeArgs& a, const ToleranceConfig& tol) {
  const std::size_t d = system.dim();
  if (!a.skip_commutant && !a.force && d > kCommutantMaxDim) {
    throw GuardError("analyze: d = " + std::to_string(d) + " exceeds the commutant guard (" +
                     std::to_string(kCommutantMaxDim) + "); pass --skip-commutant or --force");
  }
  Json j;
  j["system"] = system_summary(system);
  j["provenance"] = Json{{"tool", kToolName}, {"version", kVersion}, {"tolerances", to_json(tol)}, {"seed", a.seed}};

  const auto gens = system.traceless_generators();
  const auto lie = lie_dimension(gens, tol);
  j["lie"] = lie_summary(lie, d);
  bool controllable = lie.dimension == d * d - 1;
  if (a.skip_commutant) {
    j["commutant"] = nullptr;
  } else {
    const auto com = commutant_dimension(gens, tol, {.force = a.force, .want_symmetries = false});
    j["commutant"] = commutant_summary(com, d);
    if (com.controllable != controllable) {
      throw NumericalError("analyze: Lie closure and commutant verdicts disagree");
    }
  }
  j["controllable"] = controllable;
  if (!controllable) {
    j["distance"] = nullptr;
    j["qsl"] = nullptr;
    return {j, kVerdict};
  }
  auto est = epsilon_best(system, PerturbSelector::parse(a.perturb), {}, tol);
  j["distance"] = distance_json(est);
  if (est.upper.perturbation.empty()) {
    j["qsl"] = nullptr;
  } else {
    try {
      SpeedLimitReport r = t_star_lower(system, est.upper, delta_lower_bound(system, est.upper, tol));
      r.epsilon_lower = est.lower;
      j["qsl"] = to_json(r);
    } catch (const InputError& e) {
      // Certificates touching an unbounded control carry no finite time bound.
      j["qsl"] = Json{{"unavailable", e.what()}};
    }
  }
  return {j, kOk};
}

struct VerifyArgs {
  std::string pulse;
  std::string cert;
};

inline CommandResult cmd_verify_ineq(const ControlSystem& system, const VerifyArgs& a, const ToleranceConfig& tol) {
  const PiecewisePulse pulse = pulse_from_json(read_json_file(a.pulse));
  pulse.validate(system);
  DistanceCertificate cert = a.cert.empty()
                                 ? epsilon_best(system, PerturbSelector{}, {}, tol).upper
                                 : checked_certificate(system, certificate_from_json(read_json_file(a.cert), tol), tol);
  const auto chk = verify_perturbation_inequality(system, cert, pulse);
  Json j{{"lhs", chk.lhs}, {"rhs", chk.rhs}, {"holds", chk.holds}, {"segments", pulse.durations.size()},
         {"total_duration", pulse.total_duration()}, {"tolerances", to_json(tol)}};
  return {j, chk.holds ? kOk : kNumerical};
}

// ----------------------------------------------------------------------------
// Reference table for the worked models

struct TableRow {
  std::string row;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  /// "eq": |computed - reference| <= tolerance; "le": computed <= reference + tolerance.
  std::string relation = "eq";
  std::string note;
  bool pass() const {
    if (!std::isfinite(computed) || !std::isfinite(reference)) return false;
    if (relation == "le") return computed <= reference + tolerance;
    return std::abs(computed - reference) <= tolerance;
  }
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline std::vector<TableRow> reproduce_rows(const ToleranceConfig& tol = {}) {
  using std::numbers::pi;
  std::vector<TableRow> rows;

  for (double delta : {0.5, 1.0, 2.0}) {
    const ControlSystem s = build_two_qubit_ising(delta);
    const auto est = epsilon_best(s, PerturbSelector{}, {}, tol);
    const auto r = t_star_lower(s, est.upper, delta_lower_bound(s, est.upper, tol));
    rows.push_back({"two_qubit delta=" + fmt(delta), r.t_star_lower, 1.0 / (4.0 * delta), 1e-12, "eq",
                    "exact pi/(2 delta) = " + fmt(pi / (2.0 * delta))});
  }

  {
    const ControlSystem equal = build_global_control_chain(2, {1.0, 1.0});
    const bool uncontrollable = !decide_controllability(equal, tol).controllable;
    const double swap_residual = commutation_residual(pauli::swap(), equal.generators());
    rows.push_back({"global_chain gamma=(1,1) swap residual", uncontrollable ? swap_residual : 1.0, 0.0,
                    tol.commute_tol, "eq", uncontrollable ? "uncontrollable" : "unexpectedly controllable"});
    const std::vector<double> gamma{1.0, 1.2};
    const ControlSystem s = build_global_control_chain(2, gamma);
    const bool ok = decide_controllability(s, tol).controllable;
    for (double c : {0.5, 1.0}) {
      const ControlSystem sc = build_global_control_chain(2, gamma, {}, c);
      const auto cert = global_chain_gamma_certificate(sc, gamma, tol);
      const auto delta = delta_lower_bound(sc, cert, tol);
      const auto r = t_star_lower(sc, cert, delta);
      // Per-generator accounting: eps = max_j ||Delta_j|| = delta_gamma.
      const double per_generator = delta.value / (c * cert.op_norm);
      rows.push_back({"global_chain gamma=(1,1.2) c=" + fmt(c), ok ? per_generator : 0.0,
                      std::sqrt(2.0) / (c * 0.2), 1e-9, "eq",
                      std::string(ok ? "controllable" : "unexpectedly uncontrollable") +
                          "; with eps = M max||Delta|| the certified bound is " + fmt(r.t_star_lower)});
    }
  }

  for (std::size_t d : {3, 5, 10, 20, 50, 100}) {
    const double dd = static_cast<double>(d);
    const ControlSystem s = build_hopping_chain(d);
    const auto es = hermitian_eigensystem(*s.drift());
    double gap = std::numeric_limits<double>::infinity();
    double spectrum_err = 0.0;
    const auto closed = hopping_chain_spectrum(d);
    for (std::size_t k = 0; k < d; ++k) {
      spectrum_err = std::max(spectrum_err, std::abs(es.values(static_cast<Eigen::Index>(k)) - closed[k]));
      if (k > 0) gap = std::min(gap, es.values(static_cast<Eigen::Index>(k)) - es.values(static_cast<Eigen::Index>(k - 1)));
    }
    const double bound = 3.0 * pi * pi / (dd * dd);
    rows.push_back({"hopping d=" + std::to_string(d) + " min gap", spectrum_err <= 1e-10 ? gap : bound + 1.0, bound,
                    0.0, "le", "spectrum error " + fmt(spectrum_err)});
    rows.push_back({"hopping d=" + std::to_string(d) + " T*", t_star_from_epsilon(kDeltaSymmetry, 1.0, bound),
                    std::sqrt(2.0) * dd * dd / (3.0 * pi * pi), 1e-12 * dd * dd, "eq", "eps = 3 pi^2/d^2"});
  }

  for (std::size_t n : {2, 3, 4, 5, 6}) {
    const double nn = static_cast<double>(n);
    for (double c : {0.5, 1.0}) {
      const ControlSystem s = build_cross_kerr(2, n, c);
      const auto cert = cross_kerr_removal_certificate(s, tol);
      const auto delta = delta_lower_bound(s, cert, tol);
      const auto r = t_star_lower(s, cert, delta);
      const bool even = n % 2 == 0;
      const std::string tag = "cross_kerr N=" + std::to_string(n) + " c=" + fmt(c);
      if (even) {
        rows.push_back({tag, r.t_star_lower, 1.0 / (c * nn * nn), 1e-12, "eq",
                        "||n1 n2|| = " + fmt(cert.op_norm)});
      } else {
        rows.push_back({tag + " norm", cert.op_norm, (nn * nn - 1.0) / 4.0, 1e-9, "eq",
                        "N^2/4 is not attained for odd N; T* = " + fmt(r.t_star_lower)});
      }
    }
  }
  return rows;
}

inline CommandResult cmd_reproduce(const ToleranceConfig& tol) {
  Json rows = Json::array();
  bool all = true;
  for (const auto& r : reproduce_rows(tol)) {
    all = all && r.pass();
    rows.push_back(Json{{"row", r.row},
                        {"computed", r.computed},
                        {"reference", r.reference},
                        {"relation", r.relation},
                        {"tolerance", r.tolerance},
                        {"status", r.pass() ? "PASS" : "FAIL"},
                        {"note", r.note}});
  }
  Json j{{"rows", rows}, {"all_pass", all}, {"tolerances", to_json(tol)}};
  return {j, all ? kOk : kNumerical};
}

}  // namespace qdist::cli
