// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qfnred/errors.hpp"

namespace qfnred {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;
using LabelSet = std::vector<std::string>;

// A pivot counts as invertible iff its 2-norm condition number is below this.
inline constexpr double kMaxPivotCondition = 1e12;

// Throws Error(non_finite) if any entry is NaN or Inf.
void require_finite(const ComplexMatrix& m, std::string_view what);

// Rows/cols picked out of `m` in the given order.
ComplexMatrix submatrix(const ComplexMatrix& m, std::span<const Index> rows,
                        std::span<const Index> cols);

// max(1, sigma_max) / sigma_min; +inf when singular, 1 for an empty matrix.
double condition_number(const ComplexMatrix& m);

// Exact equality of shape and entries.
bool same_matrix(const ComplexMatrix& a, const ComplexMatrix& b);

// ||a - b||_F / max(1, ||a||_F, ||b||_F).
double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b);

struct BlockGroup {
  std::string label;
  std::vector<Index> indices;
};

// Labeled, disjoint index groups covering 0..size()-1. Rows and columns share
// the same grouping, so every BlockOperatorMatrix is square at block level.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<BlockGroup> groups);

  // Consecutive groups of the given sizes.
  static BlockPartition contiguous(const std::vector<std::pair<std::string, Index>>& sizes);

  Index size() const noexcept { return size_; }
  const std::vector<BlockGroup>& groups() const noexcept { return groups_; }
  bool contains(std::string_view label) const;
  const BlockGroup& group(std::string_view label) const;
  LabelSet labels() const;

  // Indices of the listed groups, concatenated in partition order.
  std::vector<Index> indices_of(std::span<const std::string> labels) const;
  LabelSet complement(std::span<const std::string> labels) const;

  // Contiguous renumbering of the kept groups, in partition order.
  BlockPartition restricted_to(std::span<const std::string> kept) const;

 private:
  std::vector<BlockGroup> groups_;
  Index size_ = 0;
};

class BlockOperatorMatrix {
 public:
  BlockOperatorMatrix(ComplexMatrix matrix, BlockPartition partition);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  const BlockPartition& partition() const noexcept { return partition_; }

 private:
  ComplexMatrix matrix_;
  BlockPartition partition_;
};

ComplexMatrix block(const BlockOperatorMatrix& m, std::string_view row_label,
                    std::string_view col_label);

// Sub-matrix spanning several labeled groups on each side.
ComplexMatrix block(const BlockOperatorMatrix& m, std::span<const std::string> row_labels,
                    std::span<const std::string> col_labels);

// X / X_pp = X_cc - X_cp X_pp^{-1} X_pc with c the complement labels. The
// pivot is solved by LU after passing the condition-number policy.
BlockOperatorMatrix schur_complement(const BlockOperatorMatrix& m, const LabelSet& pivot,
                                     double max_condition = kMaxPivotCondition,
                                     std::string_view stage = {});

// Off-diagonal pivot form X / X_{I1,I2}; rows follow the complement of I1 and
// columns the complement of I2, so the result carries no partition.
ComplexMatrix schur_complement(const BlockOperatorMatrix& m, const LabelSet& row_pivot,
                               const LabelSet& col_pivot,
                               double max_condition = kMaxPivotCondition);

// Relative rank threshold: singular values below rank_tol * sigma_max count as zero.
double default_rank_tol(const ComplexMatrix& a);

// Moore-Penrose pseudoinverse via SVD.
ComplexMatrix generalized_inverse(const ComplexMatrix& a,
                                  std::optional<double> rank_tol = std::nullopt);

enum class InclusionMode { image, kernel };

struct InclusionResult {
  bool holds = false;
  double residual = 0.0;
};

// image: im(sub) within im(ambient); kernel: ker(ambient) within ker(sub).
InclusionResult inclusion_check(const ComplexMatrix& sub, const ComplexMatrix& ambient,
                                InclusionMode mode,
                                std::optional<double> rank_tol = std::nullopt,
                                double tol = 1e-9);

// G11 - G12 G22^- G21 with the Moore-Penrose inverse, refused unless
// im(G21) within im(G22) and ker(G22) within ker(G12).
BlockOperatorMatrix generalized_schur_complement(const BlockOperatorMatrix& m,
                                                 const LabelSet& pivot,
                                                 std::optional<double> rank_tol = std::nullopt);

// Same formula with a caller-supplied generalized inverse of the pivot and no
// inclusion screening.
BlockOperatorMatrix schur_complement_with_inverse(const BlockOperatorMatrix& m,
                                                  const LabelSet& pivot,
                                                  const ComplexMatrix& pivot_inverse);

// (X / X_first) / (X / X_first)_second. Errors name the failing stage.
BlockOperatorMatrix successive_schur(const BlockOperatorMatrix& m, const LabelSet& first_pivot,
                                     const LabelSet& second_pivot,
                                     double max_condition = kMaxPivotCondition);

// Inverse of [[P, Q], [R, S]] from P^{-1} and the complement S - R P^{-1} Q.
ComplexMatrix banachiewicz_inverse(const ComplexMatrix& p, const ComplexMatrix& q,
                                   const ComplexMatrix& r, const ComplexMatrix& s,
                                   double max_condition = kMaxPivotCondition);

}  // namespace qfnred
