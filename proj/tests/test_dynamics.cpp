// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "qfnred/dynamics.hpp"
#include "qfnred/fixtures.hpp"
#include "qfnred/reduce.hpp"
#include "support/random_family.hpp"

using namespace qfnred;
using namespace qfnred::testing;

namespace {

const Complex kI(0.0, 1.0);

// exp(-iHt) for Hermitian H by eigendecomposition.
ComplexMatrix unitary_evolution(const ComplexMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXcd phases = (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

ComplexMatrix plus_state() {
  ComplexMatrix r = ComplexMatrix::Constant(2, 2, 0.5);
  return r;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::make(plus_state()));
  ComplexMatrix bad_trace = plus_state() * 2.0;
  CHECK_THROWS_AS(DensityMatrix::make(bad_trace), Error);
  ComplexMatrix not_herm = plus_state();
  not_herm(0, 1) = kI;
  CHECK_THROWS_AS(DensityMatrix::make(not_herm), Error);
  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix::make(negative), Error);
  CHECK_THROWS_AS(DensityMatrix::basis_state(2, 2), Error);
}

TEST_CASE("vectorization is column stacking") {
  ComplexMatrix r(2, 2);
  r << 1.0, 2.0, 3.0, 4.0;
  const ComplexMatrix v = vectorize(r);
  CHECK(v(1, 0) == Complex(3.0));
  CHECK(v(2, 0) == Complex(2.0));
  CHECK(same_matrix(unvectorize(v, 2), r));
}

TEST_CASE("amplitude damping has the closed-form solution") {
  const double gamma = 0.7, t = 1.3;
  const auto s = lindblad_generator(from_slh(fixtures::amplitude_damping(gamma)));
  CHECK(s.trace_defect() < 1e-14);
  ComplexMatrix rho0(2, 2);
  rho0 << 0.25, 0.3, 0.3, 0.75;  // basis (g, e)
  const auto rho = propagate(s, DensityMatrix::make(rho0), t).matrix();
  const double decay = std::exp(-gamma * t);
  CHECK(std::abs(rho(1, 1) - 0.75 * decay) < 1e-12);
  CHECK(std::abs(rho(0, 0) - (1.0 - 0.75 * decay)) < 1e-12);
  CHECK(std::abs(rho(0, 1) - 0.3 * std::exp(-0.5 * gamma * t)) < 1e-12);
}

TEST_CASE("pure Hamiltonian gives unitary evolution") {
  const ComplexMatrix h = fixtures::sigma_z();
  const auto g = from_slh(fixtures::qubit_hamiltonian(h));
  // K = +iH in the right convention
  CHECK((g.K() - kI * h).norm() < 1e-15);
  const auto s = lindblad_generator(g);
  const double t = 0.9;
  const auto rho = propagate(s, DensityMatrix::make(plus_state()), t).matrix();
  const ComplexMatrix u = unitary_evolution(h, t);
  CHECK((rho - u * plus_state() * u.adjoint()).norm() < 1e-12);
}

TEST_CASE("propagation is a semigroup") {
  Rng rng(41);
  const auto g = random_generator(3, {ChannelRole::external, ChannelRole::external}, rng);
  const auto s = lindblad_generator(g);
  const auto rho0 = DensityMatrix::basis_state(3, 2);
  const auto one_step = propagate(s, rho0, 0.8);
  const auto two_steps = propagate(s, propagate(s, rho0, 0.3), 0.5);
  CHECK((one_step.matrix() - two_steps.matrix()).norm() < 1e-12);
  CHECK(propagate(s, rho0, 0.0).matrix() == rho0.matrix());
}

TEST_CASE("lindblad generator requires HP input") {
  CHECK_THROWS_AS(lindblad_generator(fixtures::flipped_m()), Error);
}

TEST_CASE("trace distance") {
  const auto g = DensityMatrix::basis_state(2, 0);
  const auto e = DensityMatrix::basis_state(2, 1);
  CHECK(trace_distance(g, e) == doctest::Approx(1.0));
  CHECK(trace_distance(g, g) == 0.0);
  CHECK(trace_distance(g.matrix(), DensityMatrix::make(plus_state()).matrix()) ==
        doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("convergence study on the fast cavity") {
  const auto fam = fixtures::fast_cavity();
  const auto table = convergence_study(fam, DensityMatrix::basis_state(2, 1), 1.0, {2, 4, 8, 16, 32});
  REQUIRE(table.rows.size() == 5);
  REQUIRE(table.monotone.has_value());
  CHECK(*table.monotone);
  CHECK(table.rows.back().error < 0.02);
  REQUIRE(table.ratios.size() == 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(table.ratios[i] == doctest::Approx(table.rows[i].error / table.rows[i + 1].error));
}

TEST_CASE("convergence study edge cases") {
  const auto fam = fixtures::fast_cavity();
  const auto single = convergence_study(fam, DensityMatrix::basis_state(2, 1), 1.0, {8});
  CHECK_FALSE(single.monotone.has_value());
  CHECK(single.ratios.empty());
  // exact steady state: errors are round-off and count as converged
  const auto still = convergence_study(fam, DensityMatrix::basis_state(2, 0), 1.0, {2, 4, 8});
  CHECK(still.rows.front().error < 1e-12);
  CHECK(*still.monotone);
  CHECK_THROWS_AS(convergence_study(fam, DensityMatrix::basis_state(3, 0), 1.0, {2}), Error);
}

TEST_CASE("adiabatic and direct evolution agree for a decoupled family") {
  const auto table = convergence_study(fixtures::decoupled_family(),
                                       DensityMatrix::basis_state(2, 0), 1.0, {2, 4});
  for (const auto& r : table.rows) CHECK(r.error < 1e-10);
}

}  // TEST_SUITE
