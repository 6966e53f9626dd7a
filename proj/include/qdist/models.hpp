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

// models.hpp: builders for the reference control systems and their
// closed-form reference quantities.

#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdist/control_system.hpp"
#include "qdist/distance.hpp"
#include "qdist/linalg.hpp"

namespace qdist {

enum class ModelName { two_qubit_ising, global_control_chain, hopping_chain, cross_kerr };

inline std::string to_string(ModelName m) {
  switch (m) {
    case ModelName::two_qubit_ising: return "two_qubit_ising";
    case ModelName::global_control_chain: return "global_control_chain";
    case ModelName::hopping_chain: return "hopping_chain";
    case ModelName::cross_kerr: return "cross_kerr";
  }
  return "";
}

inline ModelName model_name_from_string(const std::string& s) {
  for (auto m : {ModelName::two_qubit_ising, ModelName::global_control_chain, ModelName::hopping_chain,
                 ModelName::cross_kerr}) {
    if (to_string(m) == s) return m;
  }
  throw InputError("unknown model '" + s +
                   "' (expected two_qubit_ising, global_control_chain, hopping_chain, cross_kerr)");
}

/// Model name plus textual parameters, as given on the command line.
///
///   two_qubit_ising:      delta
///   global_control_chain: n, gamma (comma list), edges ("0-1,1-2"; default path), c
///   hopping_chain:        d
///   cross_kerr:           modes, N, c
struct ModelSpec {
  ModelName name = ModelName::hopping_chain;
  std::map<std::string, std::string> params;

  bool has(const std::string& key) const { return params.count(key) != 0; }

  const std::string& raw(const std::string& key) const {
    auto it = params.find(key);
    if (it == params.end()) throw InputError("model " + to_string(name) + ": missing parameter '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const {
    const std::string& s = raw(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw InputError("parameter '" + key + "' is not a number: '" + s + "'");
  }
  double real_or(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::size_t count(const std::string& key) const {
    const double v = real(key);
    if (v < 0 || v != std::floor(v)) throw InputError("parameter '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(key));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(tok, &pos));
        if (pos != tok.size()) throw InputError("");
      } catch (const std::exception&) {
        throw InputError("parameter '" + key + "': bad list element '" + tok + "'");
      }
    }
    return out;
  }

  /// Parses "key=value".
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("bad --param '" + assignment + "' (expected key=value)");
    params[assignment.substr(0, eq)] = assignment.substr(eq + 1);
  }
};

// ----------------------------------------------------------------------------
// Two qubits, full local control, drift delta Z (x) Z

inline ControlSystem build_two_qubit_ising(double delta) {
  if (delta == 0.0 || !std::isfinite(delta)) throw InputError("two_qubit_ising: delta must be finite and nonzero");
  using namespace pauli;
  HermitianOperator drift(delta * kron(z(), z()));
  std::vector<HermitianOperator> controls{
      HermitianOperator(on_site(x(), 0, 2)), HermitianOperator(on_site(y(), 0, 2)),
      HermitianOperator(on_site(x(), 1, 2)), HermitianOperator(on_site(y(), 1, 2))};
  return ControlSystem(drift, {}, std::move(controls));
}

// ----------------------------------------------------------------------------
// Qubit chain with Ising couplings and two global, amplitude-bounded controls

using Edge = std::pair<std::size_t, std::size_t>;

inline std::vector<Edge> path_edges(std::size_t n) {
  std::vector<Edge> out;
  for (std::size_t k = 0; k + 1 < n; ++k) out.emplace_back(k, k + 1);
  return out;
}

/// Drift sum_{(i,j)} Z_i Z_j; bounded controls sum_i gamma_i X_i and
/// sum_i gamma_i Y_i, both with cap c.
inline ControlSystem build_global_control_chain(std::size_t n, const std::vector<double>& gamma,
                                                std::vector<Edge> edges = {}, double cap = 1.0) {
  if (n < 2) throw InputError("global_control_chain: need at least two qubits");
  if (n > 10) throw GuardError("global_control_chain: n > 10 gives d > 1024");
  if (gamma.size() != n) {
    throw InputError("global_control_chain: gamma has " + std::to_string(gamma.size()) + " entries for " +
                     std::to_string(n) + " qubits");
  }
  if (edges.empty()) edges = path_edges(n);
  std::set<Edge> seen;
  using namespace pauli;
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix drift = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (auto [i, j] : edges) {
    if (i >= n || j >= n || i == j) throw InputError("global_control_chain: bad edge");
    const Edge key{std::min(i, j), std::max(i, j)};
    if (!seen.insert(key).second) throw InputError("global_control_chain: duplicate edge");
    drift += on_site(z(), i, n) * on_site(z(), j, n);
  }
  ComplexMatrix gx = ComplexMatrix::Zero(drift.rows(), drift.cols());
  ComplexMatrix gy = gx;
  for (std::size_t i = 0; i < n; ++i) {
    gx += gamma[i] * on_site(x(), i, n);
    gy += gamma[i] * on_site(y(), i, n);
  }
  return ControlSystem(HermitianOperator(drift),
                       {{HermitianOperator(gx), cap}, {HermitianOperator(gy), cap}}, {});
}

/// min over distinct pairs of ||gamma_i| - |gamma_j||, with the minimizing pair.
struct GammaSpacing {
  double delta_gamma = 0.0;
  std::size_t i = 0;
  std::size_t j = 1;
};

inline GammaSpacing gamma_spacing(const std::vector<double>& gamma) {
  if (gamma.size() < 2) throw InputError("gamma_spacing: need at least two couplings");
  GammaSpacing best{std::numeric_limits<double>::infinity(), 0, 1};
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    for (std::size_t j = i + 1; j < gamma.size(); ++j) {
      const double s = std::abs(std::abs(gamma[i]) - std::abs(gamma[j]));
      if (s < best.delta_gamma) best = {s, i, j};
    }
  }
  return best;
}

/// Moves gamma_j onto |gamma_i| (keeping its sign) in both global controls,
/// which equalizes the closest pair. Perturbs the two bounded generators by
/// (gamma_j' - gamma_j) X_j and (gamma_j' - gamma_j) Y_j.
inline DistanceCertificate global_chain_gamma_certificate(const ControlSystem& system,
                                                          const std::vector<double>& gamma,
                                                          const ToleranceConfig& tol = {}) {
  const std::size_t n = gamma.size();
  if (system.bounded().size() != 2 || system.dim() != (std::size_t{1} << n)) {
    throw InputError("global_chain_gamma_certificate: system is not a global-control chain for this gamma");
  }
  const GammaSpacing gs = gamma_spacing(gamma);
  const double sign = gamma[gs.j] < 0 ? -1.0 : 1.0;
  const double shift = sign * std::abs(gamma[gs.i]) - gamma[gs.j];
  using namespace pauli;
  DistanceCertificate cert;
  cert.method = DistanceMethod::manual;
  cert.perturbation.push_back({system.bounded_index(0), HermitianOperator(shift * on_site(x(), gs.j, n))});
  cert.perturbation.push_back({system.bounded_index(1), HermitianOperator(shift * on_site(y(), gs.j, n))});
  const auto gens = system.generators();
  detail::finalize_certificate(cert, gens, tol);
  return cert;
}

// ----------------------------------------------------------------------------
// Nearest-neighbour hopping chain with a rank-one control on site 1

inline ControlSystem build_hopping_chain(std::size_t d) {
  if (d < 2) throw InputError("hopping_chain: d must be at least 2");
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix drift = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) drift(k, k + 1) = drift(k + 1, k) = 1.0;
  ComplexMatrix control = ComplexMatrix::Zero(n, n);
  control(0, 0) = 1.0;
  return ControlSystem(HermitianOperator(drift), {}, {HermitianOperator(control)});
}

/// 2 cos(k pi / (d + 1)), k = 1..d, returned ascending.
inline std::vector<double> hopping_chain_spectrum(std::size_t d) {
  std::vector<double> out;
  for (std::size_t k = d; k >= 1; --k) {
    out.push_back(2.0 * std::cos(static_cast<double>(k) * std::numbers::pi / static_cast<double>(d + 1)));
  }
  return out;
}

/// Smallest adjacent gap of the closed-form spectrum (at the band edge).
inline double hopping_chain_min_gap(std::size_t d) {
  const double a = std::numbers::pi / static_cast<double>(d + 1);
  return 2.0 * (std::cos(a) - std::cos(2.0 * a));
}

// ----------------------------------------------------------------------------
// Bosonic modes with a fixed total photon number

using Occupation = std::vector<std::size_t>;

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(r));
}

inline constexpr std::size_t kFockMaxDim = 5000;

/// Occupation tuples with sum in [min_total, max_total], lexicographic
/// ascending within the whole list.
inline std::vector<Occupation> fock_basis(std::size_t modes, std::size_t min_total, std::size_t max_total) {
  std::vector<Occupation> out;
  Occupation cur(modes, 0);
  // Enumerate all tuples with entries <= max_total in lexicographic order.
  auto rec = [&](auto&& self, std::size_t pos, std::size_t used) -> void {
    if (pos == modes) {
      if (used >= min_total) out.push_back(cur);
      if (out.size() > kFockMaxDim) throw GuardError("Fock basis exceeds " + std::to_string(kFockMaxDim) + " states");
      return;
    }
    for (std::size_t k = 0; used + k <= max_total; ++k) {
      cur[pos] = k;
      self(self, pos + 1, used + k);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

/// a_k^dagger a_l on the span of `basis`; the basis must be closed under it.
inline ComplexMatrix hop_operator(const std::vector<Occupation>& basis, std::size_t k, std::size_t l) {
  std::map<Occupation, Eigen::Index> index;
  for (std::size_t s = 0; s < basis.size(); ++s) index[basis[s]] = static_cast<Eigen::Index>(s);
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (std::size_t s = 0; s < basis.size(); ++s) {
    Occupation o = basis[s];
    if (o[l] == 0) continue;
    double amp = std::sqrt(static_cast<double>(o[l]));
    --o[l];
    amp *= std::sqrt(static_cast<double>(o[k] + 1));
    ++o[k];
    auto it = index.find(o);
    if (it == index.end()) throw InputError("hop_operator: basis not closed under a_k^dagger a_l");
    out(it->second, static_cast<Eigen::Index>(s)) += amp;
  }
  return out;
}

inline ComplexMatrix number_operator(const std::vector<Occupation>& basis, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (Eigen::Index s = 0; s < n; ++s) out(s, s) = static_cast<double>(basis[static_cast<std::size_t>(s)][k]);
  return out;
}

struct CrossKerrOperators {
  std::vector<Occupation> basis;
  /// n_j n_{j+1}, j = 0..modes-2.
  std::vector<ComplexMatrix> kerr;
  /// a_k^dag a_l + h.c. and i(a_k^dag a_l - h.c.) for k < l, then n_k.
  std::vector<ComplexMatrix> linear;
};

/// Cross-Kerr and passive linear-optics generators on the span of `basis`.
inline CrossKerrOperators cross_kerr_operators(std::vector<Occupation> basis, std::size_t modes) {
  CrossKerrOperators out;
  out.basis = std::move(basis);
  std::vector<ComplexMatrix> number;
  for (std::size_t k = 0; k < modes; ++k) number.push_back(number_operator(out.basis, k));
  for (std::size_t j = 0; j + 1 < modes; ++j) out.kerr.push_back(number[j] * number[j + 1]);
  for (std::size_t k = 0; k < modes; ++k) {
    for (std::size_t l = k + 1; l < modes; ++l) {
      const ComplexMatrix h = hop_operator(out.basis, k, l);
      out.linear.push_back(h + h.adjoint());
      out.linear.push_back(kI * (h - h.adjoint()));
    }
  }
  for (std::size_t k = 0; k < modes; ++k) out.linear.push_back(number[k]);
  return out;
}

/// Fixed-N sector of `modes` bosonic modes: bounded generators n_j n_{j+1}
/// (cap c), unbounded generators the passive linear-optics set.
inline ControlSystem build_cross_kerr(std::size_t modes, std::size_t photons, double cap = 1.0,
                                      bool include_kerr = true) {
  if (modes < 2) throw InputError("cross_kerr: need at least two modes");
  if (photons < 1) throw InputError("cross_kerr: need at least one photon");
  const std::size_t dim = binomial(photons + modes - 1, photons);
  if (dim > kFockMaxDim) {
    throw GuardError("cross_kerr: sector dimension " + std::to_string(dim) + " exceeds " +
                     std::to_string(kFockMaxDim));
  }
  const auto ops = cross_kerr_operators(fock_basis(modes, photons, photons), modes);
  std::vector<BoundedGenerator> bounded;
  if (include_kerr) {
    for (const auto& k : ops.kerr) bounded.push_back({HermitianOperator(k), cap});
  }
  std::vector<HermitianOperator> unbounded;
  for (const auto& l : ops.linear) unbounded.push_back(HermitianOperator(l));
  return ControlSystem(std::nullopt, std::move(bounded), std::move(unbounded));
}

/// Exact sector norm of n_1 n_2 for two modes: max_a a (N - a) = floor(N^2 / 4).
inline double two_mode_kerr_norm(std::size_t photons) {
  return std::floor(static_cast<double>(photons * photons) / 4.0);
}

/// Removes the first cross-Kerr term: Delta = -n_1 n_2 on bounded generator 0.
inline DistanceCertificate cross_kerr_removal_certificate(const ControlSystem& system,
                                                          const ToleranceConfig& tol = {}) {
  if (system.bounded().empty()) throw InputError("cross_kerr_removal_certificate: no cross-Kerr generator");
  DistanceCertificate cert;
  cert.method = DistanceMethod::manual;
  cert.perturbation.push_back({system.bounded_index(0), -system.bounded()[0].op});
  const auto gens = system.generators();
  detail::finalize_certificate(cert, gens, tol);
  return cert;
}

// ----------------------------------------------------------------------------
// Dispatch and closed-form reference values

inline ControlSystem build_model(const ModelSpec& spec) {
  switch (spec.name) {
    case ModelName::two_qubit_ising:
      return build_two_qubit_ising(spec.real_or("delta", 1.0));
    case ModelName::global_control_chain: {
      const std::size_t n = spec.count("n");
      std::vector<Edge> edges;
      if (spec.has("edges")) {
        std::stringstream ss(spec.raw("edges"));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          const auto dash = tok.find('-');
          if (dash == std::string::npos) throw InputError("bad edge '" + tok + "' (expected i-j)");
          try {
            edges.emplace_back(std::stoul(tok.substr(0, dash)), std::stoul(tok.substr(dash + 1)));
          } catch (const std::exception&) {
            throw InputError("bad edge '" + tok + "'");
          }
        }
        if (edges.empty()) throw InputError("global_control_chain: empty edge list");
      }
      return build_global_control_chain(n, spec.list("gamma"), edges, spec.real_or("c", 1.0));
    }
    case ModelName::hopping_chain:
      return build_hopping_chain(spec.count("d"));
    case ModelName::cross_kerr:
      return build_cross_kerr(spec.has("modes") ? spec.count("modes") : 2, spec.count("N"), spec.real_or("c", 1.0));
  }
  throw InputError("unknown model");
}

/// Closed-form quantities quoted for each model:
///   two_qubit_ising:      exact_t_star = pi/(2 delta), t_bound = 1/(4 delta)
///   global_control_chain: delta_gamma, t_bound = sqrt(2)/(c delta_gamma)
///   hopping_chain:        min_gap_formula, gap_bound = 3 pi^2/d^2, t_bound = sqrt(2) d^2/(3 pi^2)
///   cross_kerr:           kerr_norm = floor(N^2/4), quarter_n_squared = N^2/4,
///                         quarter_form_exact (1 if N even), t_bound = 1/(c N^2)
inline std::map<std::string, double> reference_bounds(const ModelSpec& spec) {
  using std::numbers::pi;
  std::map<std::string, double> out;
  switch (spec.name) {
    case ModelName::two_qubit_ising: {
      const double delta = spec.real_or("delta", 1.0);
      if (delta == 0.0) throw InputError("two_qubit_ising: delta must be nonzero");
      out["exact_t_star"] = pi / (2.0 * std::abs(delta));
      out["t_bound"] = 1.0 / (4.0 * std::abs(delta));
      break;
    }
    case ModelName::global_control_chain: {
      const double c = spec.real_or("c", 1.0);
      const double dg = gamma_spacing(spec.list("gamma")).delta_gamma;
      out["delta_gamma"] = dg;
      out["t_bound"] = dg > 0.0 ? std::sqrt(2.0) / (c * dg) : std::numeric_limits<double>::infinity();
      break;
    }
    case ModelName::hopping_chain: {
      const std::size_t d = spec.count("d");
      if (d < 2) throw InputError("hopping_chain: d must be at least 2");
      const double dd = static_cast<double>(d);
      out["min_gap_formula"] = hopping_chain_min_gap(d);
      out["gap_bound"] = 3.0 * pi * pi / (dd * dd);
      out["t_bound"] = std::sqrt(2.0) * dd * dd / (3.0 * pi * pi);
      break;
    }
    case ModelName::cross_kerr: {
      const std::size_t n = spec.count("N");
      if (n < 1) throw InputError("cross_kerr: N must be at least 1");
      const double c = spec.real_or("c", 1.0);
      const double nn = static_cast<double>(n);
      out["kerr_norm"] = two_mode_kerr_norm(n);
      out["quarter_n_squared"] = nn * nn / 4.0;
      out["quarter_form_exact"] = n % 2 == 0 ? 1.0 : 0.0;
      out["t_bound"] = 1.0 / (c * nn * nn);
      break;
    }
  }
  return out;
}

}  // namespace qdist
