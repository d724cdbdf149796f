// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "qfnred/blockmat.hpp"
#include "qfnred/validation.hpp"

namespace qfnred {

enum class ChannelRole { external, internal };

const char* to_string(ChannelRole role);

// Operators on h (x) K are stored channel-major: index j*d + i addresses the
// i-th basis vector of h in channel j.

// Block label of channel j in generator-shaped block matrices.
std::string channel_label(Index j);

// blockdiag(v, ..., v) with `channels` copies.
ComplexMatrix channel_embed(const ComplexMatrix& v, Index channels);

// Right Ito generator matrix [[K, L], [M, N - I]] on initial space of
// dimension d with n field channels. L is d x dn, M is dn x d, N is dn x dn.
class ItoGeneratorMatrix {
 public:
  // Validates dimensions, finiteness and the Hudson-Parthasarathy conditions;
  // throws Error(validation) naming the failed residuals.
  static ItoGeneratorMatrix make(ComplexMatrix k, ComplexMatrix l, ComplexMatrix m,
                                 ComplexMatrix n, std::vector<ChannelRole> roles,
                                 double tol = kDefaultTol);
  // Dimension checks only. Exists so tests and tools can hold invalid data.
  static ItoGeneratorMatrix unchecked(ComplexMatrix k, ComplexMatrix l, ComplexMatrix m,
                                      ComplexMatrix n, std::vector<ChannelRole> roles);

  // Zero dynamics: K = L = M = 0, N = I.
  static ItoGeneratorMatrix trivial(Index d, Index n);

  Index initial_dim() const noexcept { return d_; }
  Index channels() const noexcept { return static_cast<Index>(roles_.size()); }

  const ComplexMatrix& K() const noexcept { return k_; }
  const ComplexMatrix& L() const noexcept { return l_; }
  const ComplexMatrix& M() const noexcept { return m_; }
  const ComplexMatrix& N() const noexcept { return n_; }

  ComplexMatrix L(Index j) const { return l_.middleCols(j * d_, d_); }
  ComplexMatrix M(Index j) const { return m_.middleRows(j * d_, d_); }
  ComplexMatrix N(Index i, Index j) const { return n_.block(i * d_, j * d_, d_, d_); }

  const std::vector<ChannelRole>& roles() const noexcept { return roles_; }
  std::vector<Index> channels_with(ChannelRole role) const;

  // The full d(n+1) square matrix.
  ComplexMatrix matrix() const;

  // matrix() partitioned into "sys" and one group per channel, "ch0", "ch1", ...
  BlockOperatorMatrix block_matrix() const;

  friend bool operator==(const ItoGeneratorMatrix& a, const ItoGeneratorMatrix& b);

 private:
  ItoGeneratorMatrix(ComplexMatrix k, ComplexMatrix l, ComplexMatrix m, ComplexMatrix n,
                     std::vector<ChannelRole> roles);

  Index d_ = 0;
  ComplexMatrix k_, l_, m_, n_;
  std::vector<ChannelRole> roles_;
};

// ||NN* - I||, ||N*N - I||, ||K + K* + LL*||, ||M + NL*||.
ValidationFragment validate_hp(const ItoGeneratorMatrix& g, double tol = kDefaultTol);

// Conventional (S, C, H) parametrization: S is dn x dn unitary scattering, C
// the dn x d column of coupling operators, H the Hermitian Hamiltonian.
struct SlhTriple {
  ComplexMatrix S;
  ComplexMatrix C;
  ComplexMatrix H;
  std::vector<ChannelRole> roles;
};

// Right-convention generator of an SLH model: the adjoint of the left one, so
// N = S*, L = C*, K = -LL*/2 + iH, M = -NL*.
ItoGeneratorMatrix from_slh(const SlhTriple& t, double tol = kDefaultTol);

// Largest d1*d2*(n1+n2+1) accepted by concatenate.
inline constexpr Index kMaxConcatenatedSize = 4096;

// Parallel composition on h1 (x) h2; channels of g1 come first.
ItoGeneratorMatrix concatenate(const ItoGeneratorMatrix& g1, const ItoGeneratorMatrix& g2,
                               Index max_size = kMaxConcatenatedSize);

// New channel j is old channel permutation[j]; roles are given in new order.
ItoGeneratorMatrix relabel_channels(const ItoGeneratorMatrix& g,
                                    const std::vector<Index>& permutation,
                                    std::vector<ChannelRole> roles);

// Orthogonal splitting h = h_s + h_f given by an orthonormal slow basis.
class SubspaceDecomposition {
 public:
  // Throws Error(validation) unless the columns are orthonormal to 1e-10.
  static SubspaceDecomposition from_slow_basis(const ComplexMatrix& slow_basis);

  Index dim() const noexcept { return slow_.rows(); }
  Index slow_dim() const noexcept { return slow_.cols(); }
  Index fast_dim() const noexcept { return fast_.cols(); }

  const ComplexMatrix& slow_basis() const noexcept { return slow_; }
  const ComplexMatrix& fast_basis() const noexcept { return fast_; }
  ComplexMatrix slow_projector() const { return slow_ * slow_.adjoint(); }
  ComplexMatrix fast_projector() const { return fast_ * fast_.adjoint(); }

  friend bool operator==(const SubspaceDecomposition& a, const SubspaceDecomposition& b);

 private:
  SubspaceDecomposition(ComplexMatrix slow, ComplexMatrix fast)
      : slow_(std::move(slow)), fast_(std::move(fast)) {}

  ComplexMatrix slow_;
  ComplexMatrix fast_;
};

// The k-family K(k) = k^2 Y + k A + B, L(k) = k F + G, N fixed, together with
// the slow/fast splitting of the initial space.
class ScaledGeneratorFamily {
 public:
  // Validates shapes, finiteness, unitarity of N and the component identities
  // B + B* = -GG*, A + A* = -(FG* + GF*), Y + Y* = -FF*.
  static ScaledGeneratorFamily make(ComplexMatrix y, ComplexMatrix a, ComplexMatrix b,
                                    ComplexMatrix f, ComplexMatrix g, ComplexMatrix n,
                                    SubspaceDecomposition decomp,
                                    std::vector<ChannelRole> roles, double tol = kDefaultTol);
  static ScaledGeneratorFamily unchecked(ComplexMatrix y, ComplexMatrix a, ComplexMatrix b,
                                         ComplexMatrix f, ComplexMatrix g, ComplexMatrix n,
                                         SubspaceDecomposition decomp,
                                         std::vector<ChannelRole> roles);

  Index initial_dim() const noexcept { return y_.rows(); }
  Index channels() const noexcept { return static_cast<Index>(roles_.size()); }

  const ComplexMatrix& Y() const noexcept { return y_; }
  const ComplexMatrix& A() const noexcept { return a_; }
  const ComplexMatrix& B() const noexcept { return b_; }
  const ComplexMatrix& F() const noexcept { return f_; }
  const ComplexMatrix& G() const noexcept { return g_; }
  const ComplexMatrix& N() const noexcept { return n_; }
  const SubspaceDecomposition& decomposition() const noexcept { return decomp_; }
  const std::vector<ChannelRole>& roles() const noexcept { return roles_; }
  std::vector<Index> channels_with(ChannelRole role) const;

  ScaledGeneratorFamily with_roles(std::vector<ChannelRole> roles) const;

  friend bool operator==(const ScaledGeneratorFamily& a, const ScaledGeneratorFamily& b);

 private:
  ScaledGeneratorFamily(ComplexMatrix y, ComplexMatrix a, ComplexMatrix b, ComplexMatrix f,
                        ComplexMatrix g, ComplexMatrix n, SubspaceDecomposition decomp,
                        std::vector<ChannelRole> roles);

  ComplexMatrix y_, a_, b_, f_, g_, n_;
  SubspaceDecomposition decomp_;
  std::vector<ChannelRole> roles_;
};

// Component identities and unitarity of N.
ValidationFragment validate_family_hp(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

ItoGeneratorMatrix instantiate(const ScaledGeneratorFamily& fam, double k,
                               double tol = kDefaultTol);

// Hamiltonian coefficient (X - X*) / (2i) of a K-type operator.
ComplexMatrix hamiltonian_part(const ComplexMatrix& x);

// Slow/fast structure: P_s F = 0, Y = P_f Y P_f, invertible Y_ff, the block
// form of the Hamiltonian coefficients, and the component identities.
ValidationFragment validate_structure(const ScaledGeneratorFamily& fam, double tol = kDefaultTol);

// Blocks of the k -> infinity limit that must vanish (or be unitary) for the
// fast states to decouple.
struct FastLimitBlocks {
  ComplexMatrix L_hat;   // s x dn: G_s - A_sf Y_ff^{-1} F_f
  ComplexMatrix N_hat;   // dn x dn: N + N F_f* Y_ff^{-1} F_f
  ComplexMatrix L_hat_slow, L_hat_fast;
  ComplexMatrix N_hat_ss, N_hat_sf, N_hat_fs, N_hat_ff;
};

// Requires an invertible Y_ff; throws SingularPivotError otherwise.
FastLimitBlocks fast_limit_blocks(const ScaledGeneratorFamily& fam);

ValidationFragment validate_fast_decoupling(const ScaledGeneratorFamily& fam,
                                            double tol = kDefaultTol);

}  // namespace qfnred
