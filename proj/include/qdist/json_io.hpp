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

// json_io.hpp: JSON encodings of matrices, systems, certificates, pulses and
// tolerance sets. Parsing is fail-closed: unknown keys are rejected and every
// error names the offending location.
//
//   matrix:      {"rows": n, "cols": m, "re": [row-major], "im": [row-major]}
//   system:      {"format": 1, "dim": d, "drift": matrix | null,
//                 "bounded": [{"op": matrix, "cap": c}], "unbounded": [matrix],
//                 "name": string (optional), "reference": object (optional)}
//   certificate: {"method": ..., "perturbation": [{"generator": k, "delta": matrix}],
//                 "op_norm", "l11_norm", "effective_epsilon",
//                 "verified_uncontrollable", "degenerate", "symmetry_witness": matrix | null}
//   pulse:       {"durations": [...], "amplitudes": [[per control] per segment]}

#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "qdist/control_system.hpp"
#include "qdist/distance.hpp"
#include "qdist/linalg.hpp"
#include "qdist/speed_limit.hpp"

namespace qdist {

using Json = nlohmann::json;

inline constexpr int kSystemFormat = 1;

namespace detail {

inline void check_keys(const Json& j, const std::set<std::string>& required, const std::set<std::string>& optional,
                       const std::string& where) {
  if (!j.is_object()) throw InputError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!required.count(key) && !optional.count(key)) throw InputError(where + ": unknown field '" + key + "'");
  }
  for (const auto& key : required) {
    if (!j.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  }
}

inline double get_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InputError(where + ": expected a number");
  return j.get<double>();
}

inline std::size_t get_count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw InputError(where + ": expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

inline const Json& get_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array");
  return j;
}

}  // namespace detail

// ----------------------------------------------------------------------------
// Matrices

inline Json to_json(const ComplexMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re.push_back(m(i, k).real());
      im.push_back(m(i, k).imag());
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

inline ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  detail::check_keys(j, {"rows", "cols", "re", "im"}, {}, where);
  const std::size_t rows = detail::get_count(j["rows"], where + ".rows");
  const std::size_t cols = detail::get_count(j["cols"], where + ".cols");
  if (rows == 0 || cols == 0) throw InputError(where + ": rows and cols must be positive");
  const Json& re = detail::get_array(j["re"], where + ".re");
  const Json& im = detail::get_array(j["im"], where + ".im");
  if (re.size() != rows * cols || im.size() != rows * cols) {
    throw InputError(where + ": re/im must each hold rows*cols = " + std::to_string(rows * cols) + " entries");
  }
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < rows * cols; ++k) {
    const std::string at = where + "[" + std::to_string(k) + "]";
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
        Complex(detail::get_number(re[k], at + ".re"), detail::get_number(im[k], at + ".im"));
  }
  if (!all_finite(m)) throw InputError(where + ": non-finite entry");
  return m;
}

inline HermitianOperator hermitian_from_json(const Json& j, const std::string& where, const ToleranceConfig& tol) {
  try {
    return HermitianOperator(matrix_from_json(j, where), tol);
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

// ----------------------------------------------------------------------------
// Tolerances

inline Json to_json(const ToleranceConfig& t) {
  return Json{{"hermiticity_tol", t.hermiticity_tol}, {"trace_tol", t.trace_tol},
              {"rank_rel_tol", t.rank_rel_tol},       {"commute_tol", t.commute_tol},
              {"degeneracy_tol", t.degeneracy_tol}};
}

/// Overrides the fields present in `j`.
inline ToleranceConfig tolerances_from_json(const Json& j, ToleranceConfig base = {},
                                            const std::string& where = "tolerances") {
  detail::check_keys(j, {}, {"hermiticity_tol", "trace_tol", "rank_rel_tol", "commute_tol", "degeneracy_tol"}, where);
  auto field = [&](const char* key, double& into) {
    if (j.contains(key)) into = detail::get_number(j[key], where + "." + key);
  };
  field("hermiticity_tol", base.hermiticity_tol);
  field("trace_tol", base.trace_tol);
  field("rank_rel_tol", base.rank_rel_tol);
  field("commute_tol", base.commute_tol);
  field("degeneracy_tol", base.degeneracy_tol);
  base.validate();
  return base;
}

// ----------------------------------------------------------------------------
// Systems

inline Json to_json(const ControlSystem& s) {
  Json bounded = Json::array();
  for (const auto& b : s.bounded()) bounded.push_back(Json{{"op", to_json(b.op.matrix())}, {"cap", b.cap}});
  Json unbounded = Json::array();
  for (const auto& u : s.unbounded()) unbounded.push_back(to_json(u.matrix()));
  return Json{{"format", kSystemFormat},
              {"dim", s.dim()},
              {"drift", s.drift() ? to_json(s.drift()->matrix()) : Json(nullptr)},
              {"bounded", bounded},
              {"unbounded", unbounded}};
}

inline ControlSystem system_from_json(const Json& j, const ToleranceConfig& tol = {}) {
  detail::check_keys(j, {"format", "dim", "bounded", "unbounded"}, {"drift", "name", "reference"}, "system");
  if (!j["format"].is_number_integer() || j["format"].get<int>() != kSystemFormat) {
    throw InputError("system.format: unsupported format (expected " + std::to_string(kSystemFormat) + ")");
  }
  const std::size_t d = detail::get_count(j["dim"], "system.dim");
  if (d == 0) throw InputError("system.dim: must be positive");

  auto check_dim = [&](const HermitianOperator& h, const std::string& where) {
    if (h.dim() != d) {
      throw InputError(where + ": operator is " + std::to_string(h.dim()) + "x" + std::to_string(h.dim()) +
                       " but system.dim = " + std::to_string(d));
    }
  };

  std::optional<HermitianOperator> drift;
  if (j.contains("drift") && !j["drift"].is_null()) {
    drift = hermitian_from_json(j["drift"], "system.drift", tol);
    check_dim(*drift, "system.drift");
  }
  std::vector<BoundedGenerator> bounded;
  const Json& jb = detail::get_array(j["bounded"], "system.bounded");
  for (std::size_t k = 0; k < jb.size(); ++k) {
    const std::string where = "system.bounded[" + std::to_string(k) + "]";
    detail::check_keys(jb[k], {"op", "cap"}, {}, where);
    BoundedGenerator b{hermitian_from_json(jb[k]["op"], where + ".op", tol),
                       detail::get_number(jb[k]["cap"], where + ".cap")};
    check_dim(b.op, where + ".op");
    bounded.push_back(std::move(b));
  }
  std::vector<HermitianOperator> unbounded;
  const Json& ju = detail::get_array(j["unbounded"], "system.unbounded");
  for (std::size_t k = 0; k < ju.size(); ++k) {
    const std::string where = "system.unbounded[" + std::to_string(k) + "]";
    unbounded.push_back(hermitian_from_json(ju[k], where, tol));
    check_dim(unbounded.back(), where);
  }
  if (!drift && bounded.empty() && unbounded.empty()) throw InputError("system: empty generator list");
  return ControlSystem(std::move(drift), std::move(bounded), std::move(unbounded));
}

// ----------------------------------------------------------------------------
// Certificates

inline Json to_json(const DistanceCertificate& c) {
  Json pert = Json::array();
  for (const auto& p : c.perturbation) {
    pert.push_back(Json{{"generator", p.generator}, {"delta", to_json(p.delta.matrix())}});
  }
  return Json{{"method", to_string(c.method)},
              {"perturbation", pert},
              {"op_norm", c.op_norm},
              {"l11_norm", c.l11_norm},
              {"effective_epsilon", c.effective_epsilon()},
              {"verified_uncontrollable", c.verified_uncontrollable},
              {"degenerate", c.degenerate},
              {"symmetry_witness", c.symmetry_witness ? to_json(c.symmetry_witness->matrix()) : Json(nullptr)}};
}

/// Reads a certificate as stored. Callers that rely on it must re-verify
/// against their system (see verify_certificate).
inline DistanceCertificate certificate_from_json(const Json& j, const ToleranceConfig& tol = {}) {
  detail::check_keys(j, {"method", "perturbation"},
                     {"op_norm", "l11_norm", "effective_epsilon", "verified_uncontrollable", "degenerate",
                      "symmetry_witness"},
                     "certificate");
  DistanceCertificate c;
  if (!j["method"].is_string()) throw InputError("certificate.method: expected a string");
  c.method = distance_method_from_string(j["method"].get<std::string>());
  const Json& jp = detail::get_array(j["perturbation"], "certificate.perturbation");
  for (std::size_t k = 0; k < jp.size(); ++k) {
    const std::string where = "certificate.perturbation[" + std::to_string(k) + "]";
    detail::check_keys(jp[k], {"generator", "delta"}, {}, where);
    c.perturbation.push_back(
        {detail::get_count(jp[k]["generator"], where + ".generator"), hermitian_from_json(jp[k]["delta"], where + ".delta", tol)});
  }
  if (j.contains("op_norm")) c.op_norm = detail::get_number(j["op_norm"], "certificate.op_norm");
  if (j.contains("l11_norm")) c.l11_norm = detail::get_number(j["l11_norm"], "certificate.l11_norm");
  if (j.contains("verified_uncontrollable")) {
    if (!j["verified_uncontrollable"].is_boolean()) throw InputError("certificate.verified_uncontrollable: expected a boolean");
    c.verified_uncontrollable = j["verified_uncontrollable"].get<bool>();
  }
  if (j.contains("degenerate")) {
    if (!j["degenerate"].is_boolean()) throw InputError("certificate.degenerate: expected a boolean");
    c.degenerate = j["degenerate"].get<bool>();
  }
  if (j.contains("symmetry_witness") && !j["symmetry_witness"].is_null()) {
    c.symmetry_witness = hermitian_from_json(j["symmetry_witness"], "certificate.symmetry_witness", tol);
  }
  return c;
}

// ----------------------------------------------------------------------------
// Pulses and reports

inline Json to_json(const PiecewisePulse& p) {
  return Json{{"durations", p.durations}, {"amplitudes", p.amplitudes}};
}

inline PiecewisePulse pulse_from_json(const Json& j) {
  detail::check_keys(j, {"durations", "amplitudes"}, {}, "pulse");
  PiecewisePulse p;
  const Json& jd = detail::get_array(j["durations"], "pulse.durations");
  for (std::size_t s = 0; s < jd.size(); ++s) {
    p.durations.push_back(detail::get_number(jd[s], "pulse.durations[" + std::to_string(s) + "]"));
  }
  const Json& ja = detail::get_array(j["amplitudes"], "pulse.amplitudes");
  for (std::size_t s = 0; s < ja.size(); ++s) {
    const std::string where = "pulse.amplitudes[" + std::to_string(s) + "]";
    const Json& row = detail::get_array(ja[s], where);
    std::vector<double> r;
    for (std::size_t k = 0; k < row.size(); ++k) {
      r.push_back(detail::get_number(row[k], where + "[" + std::to_string(k) + "]"));
    }
    p.amplitudes.push_back(std::move(r));
  }
  return p;
}

inline Json to_json(const SpeedLimitReport& r) {
  return Json{{"epsilon_upper", r.epsilon_upper},
              {"epsilon_lower", r.epsilon_lower ? Json(*r.epsilon_lower) : Json(nullptr)},
              {"effective_epsilon", r.effective_epsilon},
              {"delta_lower", r.delta_lower},
              {"delta_provenance", to_string(r.delta_provenance)},
              {"amplitude_cap_c", r.amplitude_cap_c},
              {"t_star_lower", r.t_star_lower},
              {"certificate", to_json(r.certificate)}};
}

// ----------------------------------------------------------------------------
// Files

/// Parses a JSON file; syntax errors carry the byte offset.
inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace qdist
