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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Each criterion also has a wall-clock budget that counts towards its verdict.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qdist/qdist.hpp"

namespace {

using namespace qdist;
using std::numbers::pi;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --- helpers shared by the randomized criteria

HermitianOperator rand_herm(std::size_t d, std::mt19937_64& rng) {
  return random_hermitian(d, rng());
}

// Random generator sets that are controllable or not with comparable odds.
std::vector<HermitianOperator> random_generator_set(std::size_t d, std::size_t k, std::mt19937_64& rng) {
  std::vector<HermitianOperator> gens;
  const int kind = static_cast<int>(rng() % 4);
  const ComplexMatrix u = haar_unitary(d, rng());
  std::normal_distribution<double> n01;
  for (std::size_t g = 0; g < k; ++g) {
    ComplexMatrix m = rand_herm(d, rng).matrix();
    if (kind == 1) {
      // Common eigenbasis: abelian.
      ComplexMatrix diag = ComplexMatrix::Zero(m.rows(), m.cols());
      for (Eigen::Index i = 0; i < m.rows(); ++i) diag(i, i) = n01(rng);
      m = u * diag * u.adjoint();
    } else if (kind == 2) {
      // Common invariant subspace spanned by the first basis vector of u.
      ComplexMatrix block = rand_herm(d, rng).matrix();
      block.row(0).tail(m.cols() - 1).setZero();
      block.col(0).tail(m.rows() - 1).setZero();
      m = u * block * u.adjoint();
    } else if (kind == 3 && g > 0) {
      // Polynomial in the first generator: still abelian.
      const ComplexMatrix& a = gens.front().matrix();
      m = n01(rng) * a + n01(rng) * a * a;
    }
    gens.emplace_back(0.5 * (m + m.adjoint()));
  }
  return gens;
}

double brute_force_min_cut(const WeightedGraph& g) {
  const std::size_t n = g.size();
  double best = std::numeric_limits<double>::infinity();
  // Vertex n-1 always on side b; every nonempty proper subset of the rest is side a.
  for (std::size_t mask = 1; mask < (std::size_t{1} << (n - 1)); ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const bool ia = i < n - 1 && (mask >> i & 1u);
        const bool jb = !(j < n - 1 && (mask >> j & 1u));
        if (ia && jb) w += g.weight(i, j);
      }
    }
    best = std::min(best, w);
  }
  return best;
}

// --- criteria

Outcome two_qubit() {
  Outcome o;
  for (double delta : {0.5, 1.0, 2.0}) {
    const ControlSystem s = build_two_qubit_ising(delta);
    const auto est = epsilon_best(s);
    const auto report = t_star_lower(s, est.upper, delta_lower_bound(s, est.upper));
    const double bound = 1.0 / (4.0 * delta);
    const double exact = pi / (2.0 * delta);
    o.require(std::abs(report.t_star_lower - bound) <= 1e-12,
              "delta=" + num(delta) + ": T* bound " + num(report.t_star_lower) + " != " + num(bound));
    o.require(std::abs(exact / report.t_star_lower - 2.0 * pi) <= 1e-12,
              "delta=" + num(delta) + ": exact/bound ratio " + num(exact / report.t_star_lower));
  }
  return o;
}

Outcome hopping() {
  Outcome o;
  for (std::size_t d = 3; d <= 100; ++d) {
    const double dd = static_cast<double>(d);
    const ControlSystem s = build_hopping_chain(d);
    const auto es = hermitian_eigensystem(*s.drift());
    const auto closed = hopping_chain_spectrum(d);
    double err = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      err = std::max(err, std::abs(es.values(kk) - closed[k]));
      if (k > 0) gap = std::min(gap, es.values(kk) - es.values(kk - 1));
    }
    const double gap_bound = 3.0 * pi * pi / (dd * dd);
    const double t_ref = std::sqrt(2.0) * dd * dd / (3.0 * pi * pi);
    const double t = t_star_from_epsilon(kDeltaSymmetry, 1.0, gap_bound);
    o.require(err <= 1e-10, "d=" + std::to_string(d) + ": spectrum error " + num(err));
    o.require(gap <= gap_bound, "d=" + std::to_string(d) + ": min gap " + num(gap) + " > " + num(gap_bound));
    o.require(std::abs(t - t_ref) <= 1e-12 * t_ref, "d=" + std::to_string(d) + ": T* " + num(t));
  }
  // The sqrt(2) floor is certified by the pipeline: merging the closest drift
  // levels leaves a projector that commutes with both generators.
  for (std::size_t d : {3, 4, 5, 6}) {
    const ControlSystem s = build_hopping_chain(d);
    const auto gens = s.generators();
    const auto cert = epsilon_upper_gap_merge(gens, 0);
    const auto db = delta_lower_bound(s, cert);
    o.require(cert.verified_uncontrollable && db.provenance == DeltaProvenance::symmetry_sqrt2,
              "d=" + std::to_string(d) + ": gap-merge certificate lacks a symmetry witness");
  }
  return o;
}

Outcome cross_kerr() {
  Outcome o;
  for (std::size_t n : {2, 3, 4, 5, 6}) {
    const double nn = static_cast<double>(n);
    // The certificate does not depend on the cap, so it is verified once per N.
    const auto cert = cross_kerr_removal_certificate(build_cross_kerr(2, n, 1.0));
    for (double c : {0.5, 1.0}) {
      const ControlSystem s = build_cross_kerr(2, n, c);
      const double norm = operator_norm(s.bounded()[0].op.matrix());
      const auto r = t_star_lower(s, cert, delta_lower_bound(s, cert));
      const std::string tag = "N=" + std::to_string(n) + " c=" + num(c);
      o.require(cert.verified_uncontrollable, tag + ": removal certificate not verified");
      if (n % 2 == 0) {
        o.require(norm == nn * nn / 4.0, tag + ": ||n1 n2|| = " + num(norm));
        o.require(std::abs(r.t_star_lower - 1.0 / (c * nn * nn)) <= 1e-12, tag + ": T* " + num(r.t_star_lower));
      } else {
        ModelSpec spec{ModelName::cross_kerr, {{"N", std::to_string(n)}}};
        const auto ref = reference_bounds(spec);
        o.require(norm == (nn * nn - 1.0) / 4.0, tag + ": ||n1 n2|| = " + num(norm));
        o.require(ref.at("quarter_form_exact") == 0.0 && ref.at("kerr_norm") == norm, tag + ": N^2/4 form flag");
      }
    }
  }
  return o;
}

Outcome global_chain() {
  Outcome o;
  const ControlSystem equal = build_global_control_chain(2, {1.0, 1.0});
  const auto gens = equal.generators();
  o.require(!decide_controllability(equal).controllable, "gamma=(1,1) reported controllable");
  const auto sym = extract_original_space_symmetry(gens);
  o.require(sym.has_value(), "gamma=(1,1): no symmetry extracted");
  if (sym) {
    // The extracted operator must lie in span{1, SWAP} and not be scalar.
    const ComplexMatrix w = sym->matrix();
    const ComplexMatrix sw = pauli::swap();
    const ComplexMatrix one = identity(4);
    // Least squares on the two-element basis.
    Eigen::MatrixXcd basis(16, 2);
    basis.col(0) = Eigen::Map<const Eigen::VectorXcd>(one.data(), 16);
    basis.col(1) = Eigen::Map<const Eigen::VectorXcd>(sw.data(), 16);
    const Eigen::VectorXcd coef = basis.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXcd>(w.data(), 16));
    const double residual = (basis * coef - Eigen::Map<const Eigen::VectorXcd>(w.data(), 16)).norm();
    o.require(residual <= 1e-8 && std::abs(coef(1)) > 1e-6, "gamma=(1,1): witness is not SWAP");
  }
  const std::vector<double> gamma{1.0, 1.2};
  o.require(decide_controllability(build_global_control_chain(2, gamma)).controllable,
            "gamma=(1,1.2) reported uncontrollable");
  for (double c : {0.5, 1.0}) {
    const ControlSystem s = build_global_control_chain(2, gamma, {}, c);
    const auto cert = global_chain_gamma_certificate(s, gamma);
    const auto db = delta_lower_bound(s, cert);
    o.require(cert.verified_uncontrollable && db.provenance == DeltaProvenance::symmetry_sqrt2,
              "c=" + num(c) + ": certificate lacks the SWAP witness");
    const double t = db.value / (c * cert.op_norm);
    o.require(std::abs(t - std::sqrt(2.0) / (c * 0.2)) <= 1e-9, "c=" + num(c) + ": T* " + num(t));
    ModelSpec spec{ModelName::global_control_chain, {{"n", "2"}, {"gamma", "1,1.2"}, {"c", num(c)}}};
    o.require(std::abs(reference_bounds(spec).at("t_bound") - t) <= 1e-9, "c=" + num(c) + ": reference mismatch");
  }
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20260501);
  std::size_t agree = 0;
  std::size_t uncontrollable = 0;
  const std::size_t trials = 240;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t d = 2 + t % 2;
    const std::size_t k = 2 + (t / 2) % 2;
    auto gens = random_generator_set(d, k, rng);
    for (auto& g : gens) g = g.traceless();
    const bool lie = lie_dimension(gens).dimension == d * d - 1;
    const bool com = commutant_dimension(gens, {}, {.force = false, .want_symmetries = false}).controllable;
    if (lie == com) ++agree;
    if (!lie) ++uncontrollable;
  }
  o.require(agree == trials, "agreement " + std::to_string(agree) + "/" + std::to_string(trials));
  o.require(uncontrollable >= trials / 5, "too few uncontrollable samples: " + std::to_string(uncontrollable));
  return o;
}

Outcome distance_consistency() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::size_t systems = 0;
  for (std::size_t t = 0; systems < 60 && t < 400; ++t) {
    const std::size_t d = 2 + t % 2;
    const bool two_bounded = t % 3 == 0;
    std::vector<BoundedGenerator> bounded{{rand_herm(d, rng), 1.0}};
    if (two_bounded) bounded.push_back({rand_herm(d, rng), 0.5});
    const ControlSystem s(rand_herm(d, rng), bounded, {});
    if (!decide_controllability(s).controllable) continue;
    ++systems;
    // With two random bounded controls the drift alone usually cannot be moved
    // to an uncontrollable system, so those systems perturb everything.
    const auto sel = PerturbSelector::parse(!two_bounded && t % 2 == 0 ? "drift" : "all");
    const auto est = epsilon_best(s, sel);
    const std::string tag = "system " + std::to_string(systems);
    o.require(est.lower.has_value(), tag + ": no lower bound");
    o.require(est.upper.verified_uncontrollable, tag + ": returned certificate not verified");
    // Independent check of the returned certificate with the Lie closure.
    auto perturbed = apply_perturbation(s.generators(), est.upper);
    for (auto& g : perturbed) g = g.traceless();
    o.require(lie_dimension(perturbed).dimension < d * d - 1, tag + ": Lie closure says still controllable");
    const double lower = est.lower.value_or(0.0);
    for (const auto& c : est.candidates) {
      if (!c.verified_uncontrollable) continue;
      o.require(lower <= c.op_norm + 1e-12, tag + ": lower " + num(lower) + " > upper " + num(c.op_norm));
    }
  }
  o.require(systems >= 50, "only " + std::to_string(systems) + " controllable systems");
  return o;
}

Outcome stoer_wagner() {
  Outcome o;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> w(0.0, 10.0);
  std::uniform_int_distribution<int> small(0, 5);
  for (std::size_t t = 0; t < 300; ++t) {
    const std::size_t n = 3 + t % 8;
    WeightedGraph g{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // Integer weights in half the graphs make ties and zero edges common.
        double v = t % 2 == 0 ? static_cast<double>(small(rng)) : w(rng);
        if (rng() % 4 == 0) v = 0.0;
        g.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        g.weights(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
      }
    }
    const CutResult cut = stoer_wagner_min_cut(g);
    const double brute = brute_force_min_cut(g);
    o.require(std::abs(cut.cut_weight - brute) <= 1e-9 * std::max(1.0, brute),
              "graph " + std::to_string(t) + ": " + num(cut.cut_weight) + " vs " + num(brute));
    o.require(!cut.side_a.empty() && !cut.side_b.empty() && cut.side_a.size() + cut.side_b.size() == n,
              "graph " + std::to_string(t) + ": not a proper bipartition");
  }
  return o;
}

Outcome propagation_inequality() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::size_t checked = 0;
  for (std::size_t t = 0; checked < 120 && t < 600; ++t) {
    const std::size_t d = 2 + t % 3;
    std::vector<BoundedGenerator> bounded{{rand_herm(d, rng), 0.5 + static_cast<double>(t % 3)}};
    std::vector<HermitianOperator> unbounded;
    if (t % 2 == 1) unbounded.push_back(rand_herm(d, rng));
    const ControlSystem s(rand_herm(d, rng), bounded, unbounded);
    if (!decide_controllability(s).controllable) continue;
    const auto est = epsilon_best(s, PerturbSelector::parse("all"));
    const PiecewisePulse pulse = random_pulse(s, 20, rng());
    const auto chk = verify_perturbation_inequality(s, est.upper, pulse);
    ++checked;
    o.require(chk.lhs <= chk.rhs + 1e-9, "triple " + std::to_string(checked) + ": " + num(chk.lhs) + " > " +
                                             num(chk.rhs));
  }
  o.require(checked >= 100, "only " + std::to_string(checked) + " triples");
  return o;
}

Outcome norm_lemmas() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  for (std::size_t t = 0; t < 150; ++t) {
    const std::size_t d = 2 + t % 3;
    const ComplexMatrix u1 = haar_unitary(d, rng());
    ComplexMatrix u2;
    if (t % 2 == 0) {
      u2 = haar_unitary(d, rng());
    } else {
      // Nearby pair, where the inequality is close to tight.
      u2 = u1 * expi(random_hermitian(d, rng()), 1e-3 * std::abs(n01(rng)));
    }
    const double diff = operator_norm(u1 - u2);
    const double doubled = operator_norm(kron(u1, u1) - kron(u2, u2));
    o.require(doubled <= 2.0 * diff + 1e-12, "sample " + std::to_string(t) + ": tensor lemma " + num(doubled) +
                                                  " > " + num(2.0 * diff));
    const ComplexMatrix rho = random_density_matrix(d, rng());
    const double tn = trace_norm(u1 * rho * u1.adjoint() - u2 * rho * u2.adjoint());
    o.require(tn <= 2.0 * diff + 1e-12, "sample " + std::to_string(t) + ": state lemma " + num(tn) + " > " +
                                            num(2.0 * diff));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "two-qubit T* bound 1/(4 delta), exact/bound = 2 pi", 1.0, two_qubit},
      {2, "hopping chain spectrum, min gap and T* for d = 3..100", 5.0, hopping},
      {3, "cross-Kerr norms and T* bounds, N = 2..6", 1.0, cross_kerr},
      {4, "global-control chain SWAP symmetry and T* bound", 10.0, global_chain},
      {5, "Lie closure and commutant verdicts agree", 60.0, oracle_equivalence},
      {6, "lower bound below every verified certificate", 120.0, distance_consistency},
      {7, "Stoer-Wagner equals brute-force min cut", 10.0, stoer_wagner},
      {8, "perturbation propagation inequality on 20-segment pulses", 60.0, propagation_inequality},
      {9, "doubled-space norm lemmas", 30.0, norm_lemmas},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs > c.budget_s) {
      o.ok = false;
      o.detail = "runtime " + num(secs) + " s exceeds " + num(c.budget_s) + " s";
    }
    std::printf("%s criterion %d: %s (%.3f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.ok ? "" : ": ", o.detail.c_str());
    if (!o.ok) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
