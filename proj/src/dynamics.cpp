// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qfnred/reduce.hpp"

namespace qfnred {

namespace {

double min_eigenvalue(const ComplexMatrix& hermitian) {
  if (hermitian.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

// --- DensityMatrix ----------------------------------------------------------

DensityMatrix DensityMatrix::make(const ComplexMatrix& rho, double trace_tol, double eig_tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0)
    throw Error(ErrorCode::dimension, "density matrix must be square and non-empty");
  require_finite(rho, "density matrix");
  const double herm = (rho - rho.adjoint()).norm();
  if (herm > 1e-12 * std::max(1.0, rho.norm()))
    throw Error(ErrorCode::validation, "density matrix is not Hermitian");
  ComplexMatrix sym = 0.5 * (rho + rho.adjoint());
  const double tr = sym.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " differs from 1 by more than " << trace_tol;
    throw Error(ErrorCode::validation, os.str());
  }
  const double lo = min_eigenvalue(sym);
  if (lo < -eig_tol) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << lo;
    throw Error(ErrorCode::validation, os.str());
  }
  return DensityMatrix(std::move(sym));
}

DensityMatrix DensityMatrix::basis_state(Index d, Index i) {
  if (i < 0 || i >= d) throw Error(ErrorCode::invalid_argument, "basis state index out of range");
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  rho(i, i) = 1.0;
  return DensityMatrix(std::move(rho));
}

// --- Superoperator ----------------------------------------------------------

Superoperator::Superoperator(ComplexMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error(ErrorCode::dimension, "superoperator must be square");
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(m_.rows()))));
  if (d * d != m_.rows()) throw Error(ErrorCode::dimension, "superoperator size is not a square");
  d_ = d;
}

double Superoperator::trace_defect() const {
  const ComplexMatrix id = vectorize(ComplexMatrix::Identity(d_, d_));
  return (id.adjoint() * m_).norm();
}

ComplexMatrix vectorize(const ComplexMatrix& rho) {
  return rho.reshaped(rho.size(), 1);
}

ComplexMatrix unvectorize(const ComplexMatrix& v, Index d) {
  if (v.size() != d * d) throw Error(ErrorCode::dimension, "vector length is not d^2");
  return v.reshaped(d, d);
}

Superoperator lindblad_generator(const ItoGeneratorMatrix& g, double tol) {
  const ValidationFragment hp = validate_hp(g, tol);
  if (!hp.passed())
    throw Error(ErrorCode::validation, "generator fails HP conditions: " + hp.failure_summary());
  const Index d = g.initial_dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix h = hamiltonian_part(g.K());
  const Complex i_unit(0.0, 1.0);

  ComplexMatrix s = -i_unit * (Eigen::kroneckerProduct(id, h).eval() -
                               Eigen::kroneckerProduct(h.transpose(), id).eval());
  for (Index j = 0; j < g.channels(); ++j) {
    const ComplexMatrix c = g.L(j).adjoint();
    const ComplexMatrix cdc = c.adjoint() * c;
    s += Eigen::kroneckerProduct(c.conjugate(), c).eval();
    s -= 0.5 * (Eigen::kroneckerProduct(id, cdc).eval() +
                Eigen::kroneckerProduct(cdc.transpose(), id).eval());
  }
  return Superoperator(std::move(s));
}

DensityMatrix propagate(const Superoperator& s, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw Error(ErrorCode::invalid_argument, "propagation time must be finite and >= 0");
  if (s.hilbert_dim() != rho0.dim())
    throw Error(ErrorCode::dimension, "state and superoperator dimensions differ");
  const Index d = rho0.dim();
  if (t == 0.0) return rho0;
  const ComplexMatrix step = (t * s.matrix()).exp();
  ComplexMatrix rho = unvectorize(step * vectorize(rho0.matrix()), d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  require_finite(rho, "propagated state");
  const double drift = std::abs(rho.trace().real() - 1.0);
  if (drift > kMaxTraceDrift) {
    std::ostringstream os;
    os << "trace drifted by " << drift << " during propagation";
    throw Error(ErrorCode::propagation_accuracy, os.str());
  }
  try {
    return DensityMatrix::make(rho, kMaxTraceDrift, 1e-8);
  } catch (const Error& e) {
    throw Error(ErrorCode::propagation_accuracy, std::string("propagated state invalid: ") + e.what());
  }
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::dimension, "trace distance of differently sized matrices");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a - b);
  return 0.5 * svd.singularValues().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return trace_distance(a.matrix(), b.matrix());
}

ConvergenceTable convergence_study(const ScaledGeneratorFamily& fam, const DensityMatrix& rho0,
                                   double t, const std::vector<double>& k_values, double tol) {
  const ComplexMatrix& vs = fam.decomposition().slow_basis();
  if (rho0.dim() != vs.cols())
    throw Error(ErrorCode::dimension, "initial state must live on the slow subspace");
  const ItoGeneratorMatrix reduced = adiabatic_eliminate(fam, tol);
  const DensityMatrix target = propagate(lindblad_generator(reduced, tol), rho0, t);
  const DensityMatrix embedded = DensityMatrix::make(vs * rho0.matrix() * vs.adjoint(), 1e-10);

  ConvergenceTable table;
  table.t = t;
  for (double k : k_values) {
    const ItoGeneratorMatrix full = instantiate(fam, k, tol);
    const DensityMatrix rho = propagate(lindblad_generator(full, tol), embedded, t);
    const ComplexMatrix slow = vs.adjoint() * rho.matrix() * vs;
    table.rows.push_back({k, trace_distance(slow, target.matrix())});
  }
  if (table.rows.size() >= 2) {
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
      const double a = table.rows[i].error;
      const double b = table.rows[i + 1].error;
      table.ratios.push_back(b > 0.0 ? a / b : std::numeric_limits<double>::infinity());
      const bool both_zero = a <= kConvergenceFloor && b <= kConvergenceFloor;
      if (!(b < a) && !both_zero) monotone = false;
    }
    table.monotone = monotone;
  }
  return table;
}

}  // namespace qfnred
