// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "qfnred/generator.hpp"
#include "qfnred/report.hpp"

namespace qfnred {

// Hermitian, unit-trace, positive semidefinite state.
class DensityMatrix {
 public:
  // Throws Error(validation) unless rho = rho* and |tr rho - 1| <= trace_tol
  // and the smallest eigenvalue is >= -eig_tol.
  static DensityMatrix make(const ComplexMatrix& rho, double trace_tol = 1e-12,
                            double eig_tol = 1e-10);
  // |i><i| on a d-dimensional space.
  static DensityMatrix basis_state(Index d, Index i);

  Index dim() const noexcept { return rho_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return rho_; }

 private:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {}
  ComplexMatrix rho_;
};

// d^2 x d^2 generator acting on column-stacked density matrices:
// vec(A rho B) = (B^T (x) A) vec(rho).
class Superoperator {
 public:
  explicit Superoperator(ComplexMatrix m);

  Index hilbert_dim() const noexcept { return d_; }
  const ComplexMatrix& matrix() const noexcept { return m_; }

  // || vec(I)^* S ||, zero for a trace-preserving generator.
  double trace_defect() const;

 private:
  ComplexMatrix m_;
  Index d_ = 0;
};

ComplexMatrix vectorize(const ComplexMatrix& rho);
ComplexMatrix unvectorize(const ComplexMatrix& v, Index d);

// drho/dt = -i[H, rho] + sum_j (c_j rho c_j* - {c_j* c_j, rho}/2) with
// H = (K - K*)/(2i) and jump operators c_j = L_j*, the adjoints of the right
// coupling blocks. Throws Error(validation) if g fails validate_hp.
Superoperator lindblad_generator(const ItoGeneratorMatrix& g, double tol = kDefaultTol);

inline constexpr double kMaxTraceDrift = 1e-8;

// exp(t S) applied to rho0. Hermiticity is symmetrized away; a trace drift
// above kMaxTraceDrift raises Error(propagation_accuracy).
DensityMatrix propagate(const Superoperator& s, const DensityMatrix& rho0, double t);

// Half the sum of singular values of a - b. Accepts general square matrices
// so sub-normalized compressed states can be compared.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Errors below this are treated as exact zeros when judging monotonicity.
inline constexpr double kConvergenceFloor = 1e-12;

// For each k: propagate V_s rho0 V_s* under instantiate(fam, k), compress
// back with V_s (no renormalization) and compare with the evolution of rho0
// under adiabatic_eliminate(fam). rho0 lives on the slow space.
ConvergenceTable convergence_study(const ScaledGeneratorFamily& fam, const DensityMatrix& rho0,
                                   double t, const std::vector<double>& k_values,
                                   double tol = kDefaultTol);

}  // namespace qfnred
