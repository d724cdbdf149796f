// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// Reference computations written directly from the defining formulas with
// dense inverses. They share no code with the library's reduction routines.

#pragma once

#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "qfnred/generator.hpp"

namespace qfnred::testing {

using IndexList = std::vector<Index>;

inline ComplexMatrix pick(const ComplexMatrix& m, const IndexList& rows, const IndexList& cols) {
  ComplexMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

inline IndexList all_of(Index n) {
  IndexList v(n);
  for (Index i = 0; i < n; ++i) v[i] = i;
  return v;
}

inline ComplexMatrix pick_rows(const ComplexMatrix& m, const IndexList& rows) {
  return pick(m, rows, all_of(m.cols()));
}

inline ComplexMatrix pick_cols(const ComplexMatrix& m, const IndexList& cols) {
  return pick(m, all_of(m.rows()), cols);
}

inline IndexList complement_of(Index n, const IndexList& p) {
  IndexList out;
  for (Index i = 0; i < n; ++i)
    if (std::find(p.begin(), p.end(), i) == p.end()) out.push_back(i);
  return out;
}

// Rows of the channel space h (x) C^n belonging to channels with `role`.
inline IndexList channel_indices(const std::vector<ChannelRole>& roles, ChannelRole role, Index d) {
  IndexList out;
  for (std::size_t j = 0; j < roles.size(); ++j)
    if (roles[j] == role)
      for (Index i = 0; i < d; ++i) out.push_back(static_cast<Index>(j) * d + i);
  return out;
}

inline double dense_condition(const ComplexMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& s = svd.singularValues();
  return std::max(1.0, s(0)) / s(s.size() - 1);
}

// X_cc - X_cp X_pp^{-1} X_pc with an explicit inverse; rows and columns of
// the result follow the ascending complement of p.
inline ComplexMatrix dense_schur(const ComplexMatrix& x, const IndexList& p) {
  const IndexList c = complement_of(x.rows(), p);
  return pick(x, c, c) - pick(x, c, p) * pick(x, p, p).inverse() * pick(x, p, c);
}

struct GeneratorBlocks {
  ComplexMatrix K, L, M, N;
};

// Feedback reduction of a generator written out component-wise:
// K - L_i W M_i, L_e - L_i W N_ie, M_e - N_ei W M_i, N_ee - N_ei W N_ie
// with W = (N_ii - I)^{-1}.
inline GeneratorBlocks feedback_oracle(const ItoGeneratorMatrix& g) {
  const Index d = g.initial_dim();
  const IndexList in = channel_indices(g.roles(), ChannelRole::internal, d);
  const IndexList ex = channel_indices(g.roles(), ChannelRole::external, d);
  const ComplexMatrix w =
      (pick(g.N(), in, in) - ComplexMatrix::Identity(in.size(), in.size())).inverse();
  const ComplexMatrix l_i = pick_cols(g.L(), in);
  const ComplexMatrix m_i = pick_rows(g.M(), in);
  return {g.K() - l_i * w * m_i, pick_cols(g.L(), ex) - l_i * w * pick(g.N(), in, ex),
          pick_rows(g.M(), ex) - pick(g.N(), ex, in) * w * m_i,
          pick(g.N(), ex, ex) - pick(g.N(), ex, in) * w * pick(g.N(), in, ex)};
}

// Adiabatic limit from the hatted formulas with V_s, V_f the slow and fast
// bases and E_s = V_s (x) I_n:
//   K^ = V_s*(B - A V_f Y_ff^{-1} V_f* A) V_s
//   L^ = V_s*(G - A V_f Y_ff^{-1} V_f* F) E_s
//   N^ = E_s*(N + N F* V_f Y_ff^{-1} V_f* F) E_s,  M^ = -N^ L^*.
inline GeneratorBlocks adiabatic_oracle(const ScaledGeneratorFamily& fam) {
  const ComplexMatrix& vs = fam.decomposition().slow_basis();
  const ComplexMatrix& vf = fam.decomposition().fast_basis();
  const ComplexMatrix es = channel_embed(vs, fam.channels());
  const ComplexMatrix y_inv = (vf.adjoint() * fam.Y() * vf).inverse();
  const ComplexMatrix a = fam.A();
  GeneratorBlocks out;
  out.K = vs.adjoint() * (fam.B() - a * vf * y_inv * vf.adjoint() * a) * vs;
  out.L = vs.adjoint() * (fam.G() - a * vf * y_inv * vf.adjoint() * fam.F()) * es;
  out.N = es.adjoint() * (fam.N() + fam.N() * fam.F().adjoint() * vf * y_inv * vf.adjoint() * fam.F()) * es;
  out.M = -out.N * out.L.adjoint();
  return out;
}

inline ComplexMatrix assemble(const GeneratorBlocks& b) {
  const Index d = b.K.rows();
  const Index dn = b.N.rows();
  ComplexMatrix out(d + dn, d + dn);
  out << b.K, b.L, b.M, b.N - ComplexMatrix::Identity(dn, dn);
  return out;
}

// Large-k oracle: Schur complement of the instantiated generator at k with
// respect to its fast system rows, compressed onto V_s. Tends to the
// adiabatic limit as O(1/k).
inline ComplexMatrix large_k_reduction(const ScaledGeneratorFamily& fam, double k) {
  const ItoGeneratorMatrix g = instantiate(fam, k);
  const Index d = fam.initial_dim();
  const Index n = fam.channels();
  const ComplexMatrix& vs = fam.decomposition().slow_basis();
  const ComplexMatrix& vf = fam.decomposition().fast_basis();
  // rotate the system block into (slow, fast) coordinates
  ComplexMatrix u(d, d);
  u << vs, vf;
  ComplexMatrix t = ComplexMatrix::Identity(d + d * n, d + d * n);
  t.topLeftCorner(d, d) = u;
  const ComplexMatrix x = t.adjoint() * g.matrix() * t;
  IndexList fast;
  for (Index i = vs.cols(); i < d; ++i) fast.push_back(i);
  const ComplexMatrix r = dense_schur(x, fast);
  // channel rows/cols still carry the full h; compress them with V_s
  const Index s = vs.cols();
  ComplexMatrix e = ComplexMatrix::Zero(s + d * n, s + s * n);
  e.topLeftCorner(s, s) = ComplexMatrix::Identity(s, s);
  e.bottomRightCorner(d * n, s * n) = channel_embed(vs, n);
  return e.adjoint() * r * e;
}

}  // namespace qfnred::testing
