// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "qfnred/blockmat.hpp"
#include "qfnred/generator.hpp"
#include "qfnred/report.hpp"

namespace qfnred {

// Block labels of the extended generator. Channel groups use channel_label(j).
inline constexpr const char* kSystemBlock = "sys";
inline constexpr const char* kFastBlock = "fast";

// G_E = [[B, A_sf, G], [A_f, Y_ff, F_f], [-NG*, -NF_f*, N - I]] on
// h (+) h_f (+) h(x)K, partitioned into "sys", "fast", "ch0", ..., "ch{n-1}".
// A_sf = P_s A V_f is d x f, A_f = V_f* A, F_f = V_f* F with V_f the fast basis.
struct ExtendedGeneratorMatrix {
  BlockOperatorMatrix matrix;
  ScaledGeneratorFamily source;

  LabelSet internal_labels() const;
  LabelSet external_labels() const;
};

// Throws Error(structural) if validate_structure fails.
ExtendedGeneratorMatrix build_extended_generator(const ScaledGeneratorFamily& fam,
                                                 double tol = kDefaultTol);

// Instantaneous feedback limit: the complement of g by N_ii - I. Returns g
// unchanged when no channel is internal; a singular loop raises
// Error(ill_posed_network).
ItoGeneratorMatrix feedback_eliminate(const ItoGeneratorMatrix& g,
                                      double max_condition = kMaxPivotCondition);

// P_s (G_E / Y_ff) P_s restricted to h_s, as a generator on the slow space.
// Refuses (structural / fast_decoupling errors) unless both validators pass.
ItoGeneratorMatrix adiabatic_eliminate(const ScaledGeneratorFamily& fam,
                                       double tol = kDefaultTol);

// The k-family of the feedback-reduced network, obtained by expanding
// K - L_i (N_ii - I)^{-1} M_i in powers of k. Only external channels remain.
ScaledGeneratorFamily feedback_eliminate_family(const ScaledGeneratorFamily& fam,
                                                double max_condition = kMaxPivotCondition);

// Y^ = Y + F_i (N_ii - I)^{-1} N_i F*: vanishing slow rows and columns and an
// invertible fast block.
ValidationFragment validate_feedback_kernel(const ScaledGeneratorFamily& fam,
                                            double tol = kDefaultTol);

struct CompositionResult {
  ItoGeneratorMatrix nested;       // nested Schur complement of G_E
  ItoGeneratorMatrix operational;  // the two reductions applied one after the other
  double discrepancy = 0.0;        // relative Frobenius distance of the two
};

// Adiabatic elimination, then feedback: P_s((G_E / Y_ff) / (N^_ii - I)) P_s.
CompositionResult compose_fa(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

// Feedback, then adiabatic elimination: P_s((G_E / (N_ii - I)) / Y^_ff) P_s.
CompositionResult compose_af(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

// P_s(G_E / [[Y_ff, F_fi], [-N_i F_f*, N_ii - I]]) P_s in one step.
ItoGeneratorMatrix joint_elimination(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

// Runs both orders and the joint complement and records their pairwise
// deviations. Stage failures are captured in the report, never thrown.
ReductionReport check_commutativity(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

}  // namespace qfnred
