// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// Small canonical networks. They back the JSON files under fixtures/ and the
// test suites.

#pragma once

#include <string>
#include <vector>

#include "qfnred/generator.hpp"
#include "qfnred/spec_io.hpp"

namespace qfnred::fixtures {

// Qubit basis is (|g>, |e>); sigma_minus = |g><e|.
ComplexMatrix sigma_minus();
ComplexMatrix sigma_z();
// Truncated annihilation operator on m levels.
ComplexMatrix annihilation(Index levels);

ItoGeneratorMatrix trivial_generator(Index d = 2, Index n = 1);

// d = 1, two channels exchanged by N = [[0, 1], [1, 0]]; channel 1 internal.
ItoGeneratorMatrix swap_scattering();

// S = I, C = sqrt(gamma) sigma_minus, H = 0.
SlhTriple amplitude_damping(double gamma = 1.0);

// Pure Hamiltonian H on a qubit, no coupling.
SlhTriple qubit_hamiltonian(const ComplexMatrix& h);

// from_slh(amplitude_damping) with the sign of M reversed.
ItoGeneratorMatrix flipped_m(double gamma = 1.0);

// A two-port qubit with N = I and channel 1 internal: N_ii - I = 0.
ItoGeneratorMatrix ill_posed_loop();

// Two-level cavity mode with two ports (rates kappa0, kappa1); port 1 is fed
// back through a beam splitter with reflectivity r and phase phi.
ItoGeneratorMatrix cavity_loop(double kappa0 = 1.0, double kappa1 = 0.5, double r = 0.6,
                               double phi = 0.7);

// F = A = 0 with B, G, N block-diagonal over slow and fast parts: the
// adiabatic limit is the plain slow restriction. Channel 1 is internal.
ScaledGeneratorFamily decoupled_family();

struct FastCavityParams {
  Index levels = 3;        // mode truncation m, d = 2m
  double kappa = 1.0;      // mode decay rate scale
  double g = 0.5;          // qubit-mode exchange coupling
  double detuning = 0.0;   // mode detuning on the fast block
  double gamma = 0.0;      // direct qubit decay into the same port
};

// Qubit (x) truncated mode. h_s = span{|g,0>, |e,0>}, F = sqrt(kappa) a^dagger,
// A = -(FG* + GF*)/2 - i g (sigma_plus a + sigma_minus a^dagger).
ScaledGeneratorFamily fast_cavity(const FastCavityParams& p = {});

// fast_cavity with two ports; port 1 fed back through a beam splitter.
ScaledGeneratorFamily fast_cavity_loop(const FastCavityParams& p = {}, double kappa1 = 0.5,
                                       double r = 0.6, double phi = 0.7);

// fast_cavity whose N mixes |g,0> and |g,1>, so N^_sf != 0.
ScaledGeneratorFamily fast_violating();

// One internal channel with N = e^{i theta}; the detuning is tuned so that
// Y^_ff = -i(kappa/2 cot(theta/2) + h) vanishes.
ScaledGeneratorFamily feedback_kernel_violating(double kappa = 2.0, double theta = 1.0);

struct NamedFixture {
  std::string file;
  NetworkSpec spec;
};

// Every shipped fixture, keyed by file name.
std::vector<NamedFixture> all_fixtures();

inline constexpr const char* kMalformedFixtureFile = "malformed.json";
inline constexpr const char* kMalformedFixtureText =
    "{\n  \"schema_version\": \"qfnred/1\",\n  \"kind\": \"generator\",\n  \"dims\": {\"d\": 1, \"n\": 0},\n";

}  // namespace qfnred::fixtures
