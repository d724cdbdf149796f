// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/fixtures.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

namespace qfnred::fixtures {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

ComplexMatrix ket_bra(Index d, Index i, Index j) {
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  m(i, j) = 1.0;
  return m;
}

// [[r, t e^{i phi}], [t, -r e^{i phi}]] with t = sqrt(1 - r^2).
ComplexMatrix beam_splitter(double r, double phi) {
  const double t = std::sqrt(1.0 - r * r);
  const Complex e = std::exp(kI * phi);
  ComplexMatrix b(2, 2);
  b << r, t * e, t, -r * e;
  return b;
}

ComplexMatrix hstack(const std::vector<ComplexMatrix>& blocks) {
  const Index d = blocks.front().rows();
  ComplexMatrix out(d, d * static_cast<Index>(blocks.size()));
  for (std::size_t j = 0; j < blocks.size(); ++j) out.middleCols(static_cast<Index>(j) * d, d) = blocks[j];
  return out;
}

ComplexMatrix vstack(const std::vector<ComplexMatrix>& blocks) {
  const Index d = blocks.front().cols();
  ComplexMatrix out(d * static_cast<Index>(blocks.size()), d);
  for (std::size_t j = 0; j < blocks.size(); ++j) out.middleRows(static_cast<Index>(j) * d, d) = blocks[j];
  return out;
}

// Family from its physical pieces: Y = -FF*/2 - i H2, A = -(FG* + GF*)/2 - i H1,
// B = -GG*/2 - i H0.
ScaledGeneratorFamily assemble(const ComplexMatrix& f, const ComplexMatrix& g,
                               const ComplexMatrix& h0, const ComplexMatrix& h1,
                               const ComplexMatrix& h2, const ComplexMatrix& n,
                               const ComplexMatrix& slow_basis, std::vector<ChannelRole> roles) {
  ComplexMatrix y = -0.5 * f * f.adjoint() - kI * h2;
  ComplexMatrix a = -0.5 * (f * g.adjoint() + g * f.adjoint()) - kI * h1;
  ComplexMatrix b = -0.5 * g * g.adjoint() - kI * h0;
  return ScaledGeneratorFamily::make(std::move(y), std::move(a), std::move(b), f, g, n,
                                     SubspaceDecomposition::from_slow_basis(slow_basis),
                                     std::move(roles));
}

// Columns |g,0> and |e,0> of qubit (x) mode with m levels.
ComplexMatrix qubit_ground_mode_basis(Index levels) {
  ComplexMatrix v = ComplexMatrix::Zero(2 * levels, 2);
  v(0, 0) = 1.0;
  v(levels, 1) = 1.0;
  return v;
}

struct CavityParts {
  ComplexMatrix f_unit;  // I (x) a^dagger
  ComplexMatrix h1, h2, g_qubit;
};

CavityParts cavity_parts(const FastCavityParams& p) {
  const Index m = p.levels;
  const ComplexMatrix a = annihilation(m);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix sm = sigma_minus();
  const ComplexMatrix sp = sm.adjoint();
  CavityParts c;
  c.f_unit = kron(id2, a.adjoint());
  c.h1 = p.g * (kron(sp, a) + kron(sm, a.adjoint()));
  c.h2 = p.detuning * kron(id2, a.adjoint() * a);
  c.g_qubit = std::sqrt(p.gamma) * kron(sp, ComplexMatrix::Identity(m, m));
  return c;
}

}  // namespace

ComplexMatrix sigma_minus() { return ket_bra(2, 0, 1); }

ComplexMatrix sigma_z() {
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return z;
}

ComplexMatrix annihilation(Index levels) {
  ComplexMatrix a = ComplexMatrix::Zero(levels, levels);
  for (Index k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

ItoGeneratorMatrix trivial_generator(Index d, Index n) { return ItoGeneratorMatrix::trivial(d, n); }

ItoGeneratorMatrix swap_scattering() {
  ComplexMatrix n(2, 2);
  n << 0.0, 1.0, 1.0, 0.0;
  return ItoGeneratorMatrix::make(ComplexMatrix::Zero(1, 1), ComplexMatrix::Zero(1, 2),
                                  ComplexMatrix::Zero(2, 1), std::move(n),
                                  {ChannelRole::external, ChannelRole::internal});
}

SlhTriple amplitude_damping(double gamma) {
  return {ComplexMatrix::Identity(2, 2), std::sqrt(gamma) * sigma_minus(),
          ComplexMatrix::Zero(2, 2), {ChannelRole::external}};
}

SlhTriple qubit_hamiltonian(const ComplexMatrix& h) {
  return {ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(2, 2), h, {ChannelRole::external}};
}

ItoGeneratorMatrix flipped_m(double gamma) {
  const ItoGeneratorMatrix g = from_slh(amplitude_damping(gamma));
  return ItoGeneratorMatrix::unchecked(g.K(), g.L(), -g.M(), g.N(), g.roles());
}

ItoGeneratorMatrix ill_posed_loop() {
  SlhTriple t{ComplexMatrix::Identity(4, 4),
              vstack({sigma_minus(), 0.5 * sigma_minus()}),
              0.5 * sigma_z(),
              {ChannelRole::external, ChannelRole::internal}};
  return from_slh(t);
}

ItoGeneratorMatrix cavity_loop(double kappa0, double kappa1, double r, double phi) {
  const ComplexMatrix a = annihilation(2);
  SlhTriple t{kron(beam_splitter(r, phi), ComplexMatrix::Identity(2, 2)),
              vstack({std::sqrt(kappa0) * a, std::sqrt(kappa1) * a}),
              0.3 * a.adjoint() * a,
              {ChannelRole::external, ChannelRole::internal}};
  return from_slh(t);
}

ScaledGeneratorFamily decoupled_family() {
  const Index d = 3;
  const ComplexMatrix g0 = 0.8 * ket_bra(d, 1, 0);
  const ComplexMatrix g1 = 0.3 * ket_bra(d, 0, 1);
  ComplexMatrix h0 = 0.4 * (ket_bra(d, 0, 1) + ket_bra(d, 1, 0)) + 0.5 * ket_bra(d, 2, 2);
  ComplexMatrix v = ComplexMatrix::Zero(d, 2);
  v(0, 0) = 1.0;
  v(1, 1) = 1.0;
  return assemble(ComplexMatrix::Zero(d, 2 * d), hstack({g0, g1}), h0, ComplexMatrix::Zero(d, d),
                  -ket_bra(d, 2, 2), kron(beam_splitter(0.6, 0.7), ComplexMatrix::Identity(d, d)),
                  v, {ChannelRole::external, ChannelRole::internal});
}

ScaledGeneratorFamily fast_cavity(const FastCavityParams& p) {
  const CavityParts c = cavity_parts(p);
  const Index d = 2 * p.levels;
  return assemble(std::sqrt(p.kappa) * c.f_unit, c.g_qubit, ComplexMatrix::Zero(d, d), c.h1, c.h2,
                  ComplexMatrix::Identity(d, d), qubit_ground_mode_basis(p.levels),
                  {ChannelRole::external});
}

ScaledGeneratorFamily fast_cavity_loop(const FastCavityParams& p, double kappa1, double r,
                                       double phi) {
  const CavityParts c = cavity_parts(p);
  const Index d = 2 * p.levels;
  const ComplexMatrix f = hstack({std::sqrt(p.kappa) * c.f_unit, std::sqrt(kappa1) * c.f_unit});
  const ComplexMatrix g = hstack({c.g_qubit, ComplexMatrix::Zero(d, d)});
  return assemble(f, g, ComplexMatrix::Zero(d, d), c.h1, c.h2,
                  kron(beam_splitter(r, phi), ComplexMatrix::Identity(d, d)),
                  qubit_ground_mode_basis(p.levels),
                  {ChannelRole::external, ChannelRole::internal});
}

ScaledGeneratorFamily fast_violating() {
  const FastCavityParams p;
  const CavityParts c = cavity_parts(p);
  const Index d = 2 * p.levels;
  // rotation between |g,0> (index 0) and |g,1> (index 1)
  const double th = 0.4;
  ComplexMatrix n = ComplexMatrix::Identity(d, d);
  n(0, 0) = n(1, 1) = std::cos(th);
  n(0, 1) = n(1, 0) = kI * std::sin(th);
  return assemble(std::sqrt(p.kappa) * c.f_unit, c.g_qubit, ComplexMatrix::Zero(d, d), c.h1, c.h2,
                  n, qubit_ground_mode_basis(p.levels), {ChannelRole::external});
}

ScaledGeneratorFamily feedback_kernel_violating(double kappa, double theta) {
  const Index d = 2;  // |0> slow, |1> fast
  const double h = -0.5 * kappa / std::tan(0.5 * theta);
  const ComplexMatrix f = std::sqrt(kappa) * ket_bra(d, 1, 0);
  const ComplexMatrix h1 = 0.3 * (ket_bra(d, 0, 1) + ket_bra(d, 1, 0));
  ComplexMatrix v = ComplexMatrix::Zero(d, 1);
  v(0, 0) = 1.0;
  return assemble(f, ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d), h1, h * ket_bra(d, 1, 1),
                  std::exp(kI * theta) * ComplexMatrix::Identity(d, d), v,
                  {ChannelRole::internal});
}

std::vector<NamedFixture> all_fixtures() {
  return {
      {"trivial.json", {trivial_generator()}},
      {"swap_scattering.json", {swap_scattering()}},
      {"amplitude_damping.json", {amplitude_damping()}},
      {"flipped_m.json", {flipped_m()}},
      {"ill_posed_loop.json", {ill_posed_loop()}},
      {"cavity_loop.json", {cavity_loop()}},
      {"decoupled_family.json", {decoupled_family()}},
      {"fast_cavity.json", {fast_cavity()}},
      {"fast_cavity_loop.json", {fast_cavity_loop()}},
      {"fast_violating.json", {fast_violating()}},
      {"feedback_kernel_violating.json", {feedback_kernel_violating()}},
  };
}

}  // namespace qfnred::fixtures
