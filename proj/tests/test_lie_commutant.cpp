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

#include <catch_amalgamated.hpp>

#include <random>

#include "qdist/commutant.hpp"
#include "qdist/control_system.hpp"
#include "qdist/lie_closure.hpp"
#include "qdist/models.hpp"

using namespace qdist;

namespace {

std::vector<HermitianOperator> herm(std::initializer_list<ComplexMatrix> ms) {
  std::vector<HermitianOperator> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<HermitianOperator> traceless(std::vector<HermitianOperator> gens) {
  for (auto& g : gens) g = g.traceless();
  return gens;
}

std::vector<HermitianOperator> conjugated(const std::vector<HermitianOperator>& gens, const ComplexMatrix& u) {
  std::vector<HermitianOperator> out;
  for (const auto& g : gens) out.emplace_back(u * g.matrix() * u.adjoint());
  return out;
}

std::vector<HermitianOperator> random_pair(std::size_t d, std::uint64_t seed) {
  return {random_hermitian(d, seed, true), random_hermitian(d, seed + 1, true)};
}

// Commuting pair built from a shared eigenbasis.
std::vector<HermitianOperator> commuting_pair(std::size_t d, std::uint64_t seed) {
  const ComplexMatrix u = haar_unitary(d, seed);
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix a = ComplexMatrix::Zero(n, n);
  ComplexMatrix b = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, k) = static_cast<double>(k) - 0.3;
    b(k, k) = std::sin(static_cast<double>(3 * k + 1));
  }
  return traceless(herm({u * a * u.adjoint(), u * b * u.adjoint()}));
}

}  // namespace

TEST_CASE("Lie closure dimensions", "[lie]") {
  using namespace pauli;
  CHECK(lie_dimension(herm({z(), x()})).dimension == 3);
  CHECK(is_controllable_lie(herm({z(), x()})));
  const auto single = lie_dimension(herm({z()}));
  CHECK(single.dimension == 1);
  CHECK_FALSE(is_controllable_lie(herm({z()})));

  const auto local = herm({on_site(x(), 0, 2), on_site(y(), 0, 2), on_site(x(), 1, 2), on_site(y(), 1, 2)});
  CHECK(lie_dimension(local).dimension == 6);

  const auto ising = build_two_qubit_ising(1.0).traceless_generators();
  CHECK(lie_dimension(ising).dimension == 15);

  CHECK(is_controllable_lie(build_hopping_chain(4).traceless_generators()));
}

TEST_CASE("Lie closure rejects bad input", "[lie]") {
  CHECK_THROWS_AS(lie_dimension(std::vector<HermitianOperator>{}), InputError);
  CHECK_THROWS_AS(lie_dimension(herm({identity(2)})), InputError);
  CHECK_THROWS_AS(lie_dimension(herm({pauli::z(), kron(pauli::z(), pauli::z())})), InputError);
}

TEST_CASE("Lie closure basis is orthonormal", "[lie][property]") {
  const auto r = lie_dimension(build_two_qubit_ising(0.7).traceless_generators());
  REQUIRE(r.basis.size() == r.dimension);
  REQUIRE(r.converged);
  for (std::size_t i = 0; i < r.basis.size(); ++i) {
    for (std::size_t j = 0; j < r.basis.size(); ++j) {
      const double dot = detail::hs_real_dot(r.basis[i], r.basis[j]);
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("roundoff commutators do not grow the algebra", "[lie]") {
  // Commuting generators whose products carry roundoff.
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto pair = commuting_pair(3, s);
    CHECK(lie_dimension(pair).dimension == 2);
  }
  // A drift that cancels up to roundoff contributes nothing.
  const HermitianOperator h = random_hermitian(2, 5, true);
  const HermitianOperator almost_zero = h - h.scaled(1.0 + 1e-15);
  CHECK(lie_dimension(std::vector<HermitianOperator>{almost_zero, h}).dimension == 1);
}

TEST_CASE("Lie closure invariances", "[lie][property]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const std::size_t d = 2 + s % 3;
    const auto gens = s % 2 ? random_pair(d, 10 * s) : commuting_pair(d, s);
    const std::size_t dim = lie_dimension(gens).dimension;
    const ComplexMatrix u = haar_unitary(d, 77 + s);
    CHECK(lie_dimension(traceless(conjugated(gens, u))).dimension == dim);
    auto scaled = gens;
    scaled[0] = scaled[0].scaled(-3.5);
    CHECK(lie_dimension(scaled).dimension == dim);
    auto more = gens;
    more.push_back(random_hermitian(d, 900 + s, true));
    CHECK(lie_dimension(more).dimension >= dim);
  }
}

TEST_CASE("stacked adjoint matrix", "[commutant]") {
  using namespace pauli;
  CHECK(build_stacked_adjoint(herm({ComplexMatrix::Zero(2, 2)})).cwiseAbs().maxCoeff() == 0.0);
  const ComplexMatrix zx = build_stacked_adjoint(herm({z(), x()}));
  CHECK(zx.rows() == 32);
  CHECK(zx.cols() == 16);
  CHECK((zx * vec_row(identity(4))).norm() < 1e-12);
  CHECK((zx * vec_row(swap())).norm() < 1e-12);
  const ComplexMatrix three = build_stacked_adjoint(herm({z(), x(), y()}));
  CHECK(three.rows() == 48);
  CHECK(three.cols() == 16);

  // Block k is i (H^(2) (x) 1 - 1 (x) H^(2)^T).
  const ComplexMatrix h2 = tensor_double(x());
  const ComplexMatrix block = kI * (kron(h2, identity(4)) - kron(identity(4), h2.transpose()));
  CHECK((zx.bottomRows(16) - block).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("commutant nullity", "[commutant]") {
  using namespace pauli;
  const auto zx = commutant_dimension(herm({z(), x()}));
  CHECK(zx.nullity == 2);
  CHECK(zx.controllable);
  CHECK(zx.rank == 14);

  const auto zz = commutant_dimension(herm({z(), z()}));
  CHECK(zz.nullity > 2);
  CHECK_FALSE(zz.controllable);

  CHECK(commutant_dimension(build_two_qubit_ising(1.0).generators()).nullity == 2);
  CHECK(is_controllable_commutant(herm({z(), x()})));
  CHECK_FALSE(is_controllable_commutant(herm({ComplexMatrix::Zero(2, 2), x()})));
  CHECK(is_controllable_commutant(build_hopping_chain(3).generators()));
}

TEST_CASE("commutant size guard", "[commutant]") {
  const auto gens = build_hopping_chain(7).generators();
  CHECK_THROWS_AS(commutant_dimension(gens), GuardError);
}

TEST_CASE("universal null vectors and symmetry residuals", "[commutant][property]") {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const std::size_t d = 2 + s % 3;
    const auto gens = s % 3 == 0 ? commuting_pair(d, s) : random_pair(d, 40 + s);
    const ComplexMatrix stacked = build_stacked_adjoint(gens);
    const double scale = operator_norm(stacked);
    CHECK((stacked * vec_row(identity(d * d))).norm() <= 1e-10 * scale);
    // SWAP on C^d (x) C^d.
    ComplexMatrix sw = ComplexMatrix::Zero(static_cast<Eigen::Index>(d * d), static_cast<Eigen::Index>(d * d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) sw(static_cast<Eigen::Index>(i * d + j), static_cast<Eigen::Index>(j * d + i)) = 1.0;
    CHECK((stacked * vec_row(sw)).norm() <= 1e-10 * scale);

    const auto c = commutant_dimension(gens);
    CHECK(c.nullity >= 2);
    CHECK(c.symmetry_basis.size() == c.nullity);
    for (const auto& sym : c.symmetry_basis) {
      CHECK(max_abs(sym - sym.adjoint()) <= 1e-10);
      for (const auto& g : gens) {
        const ComplexMatrix g2 = tensor_double(g.matrix());
        CHECK(operator_norm(commutator(sym, g2)) <= 1e-9 * std::max(1.0, operator_norm(g2)));
      }
    }
  }
}

TEST_CASE("blockwise SVD reproduces the full stacked SVD", "[commutant][property]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t d = 2 + s % 2;
    auto gens = s % 2 ? random_pair(d, 500 + s) : commuting_pair(d, s);
    if (s % 4 == 1) gens.push_back(random_hermitian(d, 600 + s, true));
    const RankResult full = rank_and_nullity(build_stacked_adjoint(gens));
    const RankResult block = stacked_adjoint_rank(gens);
    CHECK(full.rank == block.rank);
    CHECK(full.nullity == block.nullity);
    REQUIRE(full.singular_values.size() == block.singular_values.size());
    CHECK((full.singular_values - block.singular_values).cwiseAbs().maxCoeff() < 1e-10);
    // The null bases span the same space.
    const ComplexMatrix stacked = build_stacked_adjoint(gens);
    CHECK((stacked * block.null_basis).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((block.null_basis.adjoint() * block.null_basis - ComplexMatrix::Identity(block.null_basis.cols(), block.null_basis.cols()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    // Values-only mode agrees.
    const RankResult fast = stacked_adjoint_rank(gens, {}, false);
    CHECK(fast.nullity == block.nullity);
    CHECK(fast.null_basis.size() == 0);
  }
}

TEST_CASE("Lie closure and commutant agree", "[lie][commutant][property]") {
  std::size_t uncontrollable = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t d = 2 + s % 3;
    const auto gens = s % 4 == 0 ? commuting_pair(d, s) : random_pair(d, 1000 + 2 * s);
    const bool lie = is_controllable_lie(gens);
    CHECK(lie == is_controllable_commutant(gens));
    if (!lie) ++uncontrollable;
  }
  CHECK(uncontrollable >= 20);
}

TEST_CASE("verdicts are invariant under unitary conjugation", "[commutant][property]") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t d = 2 + s % 2;
    const auto gens = s % 2 ? random_pair(d, 70 + s) : commuting_pair(d, s);
    const ComplexMatrix u = haar_unitary(d, 300 + s);
    CHECK(commutant_dimension(gens).nullity == commutant_dimension(conjugated(gens, u)).nullity);
  }
}

TEST_CASE("original-space symmetry extraction", "[commutant]") {
  using namespace pauli;
  const auto zz = herm({kron(z(), z()), kron(z(), identity(2))});
  const auto sym = extract_original_space_symmetry(zz);
  REQUIRE(sym.has_value());
  CHECK(commutation_residual(sym->matrix(), zz) < 1e-9);
  CHECK(std::abs(sym->trace()) < 1e-9);
  CHECK(sym->norm() > 1e-6);

  CHECK_FALSE(extract_original_space_symmetry(herm({z(), x()})).has_value());

  const auto chain = build_global_control_chain(2, {1.0, 1.0}).generators();
  const auto swap_sym = extract_original_space_symmetry(chain);
  REQUIRE(swap_sym.has_value());
  // Traceless part of SWAP, up to scale.
  const ComplexMatrix t = swap() - 0.5 * identity(4);
  const Complex overlap = (t.adjoint() * swap_sym->matrix()).trace() / (t.norm() * swap_sym->matrix().norm());
  CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-9);
}

TEST_CASE("controllability verdict combines both tests", "[commutant][lie]") {
  const auto v = decide_controllability(build_two_qubit_ising(1.0));
  CHECK(v.controllable);
  CHECK(v.lie_dimension == std::optional<std::size_t>(15));
  CHECK(v.commutant_nullity == std::optional<std::size_t>(2));
  const auto big = decide_controllability(build_hopping_chain(8));
  CHECK(big.controllable);
  CHECK_FALSE(big.commutant_nullity.has_value());
}
