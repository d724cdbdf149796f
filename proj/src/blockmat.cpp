// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/blockmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

namespace qfnred {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::label_lookup: return "label_lookup";
    case ErrorCode::dimension: return "dimension";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::singular_pivot: return "singular_pivot";
    case ErrorCode::ill_defined_complement: return "ill_defined_complement";
    case ErrorCode::ill_posed_network: return "ill_posed_network";
    case ErrorCode::structural: return "structural";
    case ErrorCode::fast_decoupling: return "fast_decoupling";
    case ErrorCode::validation: return "validation";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
    case ErrorCode::propagation_accuracy: return "propagation_accuracy";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

namespace {

std::string singular_message(const std::string& pivot, const std::string& stage, double cond) {
  std::ostringstream os;
  os << "singular pivot '" << pivot << "'";
  if (!stage.empty()) os << " at stage '" << stage << "'";
  os << ": condition number " << cond << " exceeds " << kMaxPivotCondition;
  return os.str();
}

std::string join(std::span<const std::string> labels) {
  std::string out;
  for (const auto& l : labels) {
    if (!out.empty()) out += "+";
    out += l;
  }
  return out;
}

Eigen::JacobiSVD<ComplexMatrix> full_svd(const ComplexMatrix& a) {
  return Eigen::JacobiSVD<ComplexMatrix>(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

// Number of singular values above rank_tol * sigma_max.
Index numerical_rank(const Eigen::VectorXd& sv, double rank_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rank_tol * sv(0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

ComplexMatrix lu_complement(const ComplexMatrix& x_cc, const ComplexMatrix& x_cp,
                            const ComplexMatrix& x_pp, const ComplexMatrix& x_pc) {
  if (x_pp.size() == 0) return x_cc;
  Eigen::PartialPivLU<ComplexMatrix> lu(x_pp);
  return x_cc - x_cp * lu.solve(x_pc);
}

}  // namespace

SingularPivotError::SingularPivotError(std::string pivot, std::string stage,
                                       double condition_number)
    : Error(ErrorCode::singular_pivot, singular_message(pivot, stage, condition_number)),
      pivot_(std::move(pivot)),
      stage_(std::move(stage)),
      condition_number_(condition_number) {}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::non_finite, std::string(what) + " has non-finite entries");
  }
}

ComplexMatrix submatrix(const ComplexMatrix& m, std::span<const Index> rows,
                        std::span<const Index> cols) {
  ComplexMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

double condition_number(const ComplexMatrix& m) {
  if (m.size() == 0) return 1.0;
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  // Unit floor on the numerator: a uniformly tiny pivot (e.g. a 1x1 round-off
  // residue) is near-singular even though its ratio is 1.
  return std::max(1.0, sv(0)) / smin;
}

bool same_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

double relative_difference(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension, "relative_difference: shape mismatch");
  }
  const double scale = std::max({1.0, a.norm(), b.norm()});
  return (a - b).norm() / scale;
}

// --- BlockPartition -------------------------------------------------------

BlockPartition::BlockPartition(std::vector<BlockGroup> groups) : groups_(std::move(groups)) {
  Index total = 0;
  for (const auto& g : groups_) total += static_cast<Index>(g.indices.size());
  std::vector<bool> seen(static_cast<size_t>(total), false);
  for (size_t i = 0; i < groups_.size(); ++i) {
    for (size_t j = 0; j < i; ++j) {
      if (groups_[i].label == groups_[j].label) {
        throw Error(ErrorCode::invalid_argument, "duplicate block label '" + groups_[i].label + "'");
      }
    }
    for (Index idx : groups_[i].indices) {
      if (idx < 0 || idx >= total || seen[static_cast<size_t>(idx)]) {
        throw Error(ErrorCode::invalid_argument,
                    "block groups must be disjoint and cover 0..size-1");
      }
      seen[static_cast<size_t>(idx)] = true;
    }
  }
  size_ = total;
}

BlockPartition BlockPartition::contiguous(
    const std::vector<std::pair<std::string, Index>>& sizes) {
  std::vector<BlockGroup> groups;
  Index offset = 0;
  for (const auto& [label, n] : sizes) {
    BlockGroup g{label, {}};
    for (Index i = 0; i < n; ++i) g.indices.push_back(offset + i);
    offset += n;
    groups.push_back(std::move(g));
  }
  return BlockPartition(std::move(groups));
}

bool BlockPartition::contains(std::string_view label) const {
  return std::any_of(groups_.begin(), groups_.end(),
                     [&](const BlockGroup& g) { return g.label == label; });
}

const BlockGroup& BlockPartition::group(std::string_view label) const {
  for (const auto& g : groups_)
    if (g.label == label) return g;
  throw Error(ErrorCode::label_lookup, "unknown block label '" + std::string(label) + "'");
}

LabelSet BlockPartition::labels() const {
  LabelSet out;
  for (const auto& g : groups_) out.push_back(g.label);
  return out;
}

std::vector<Index> BlockPartition::indices_of(std::span<const std::string> labels) const {
  for (const auto& l : labels) (void)group(l);
  std::vector<Index> out;
  for (const auto& g : groups_) {
    if (std::find(labels.begin(), labels.end(), g.label) != labels.end()) {
      out.insert(out.end(), g.indices.begin(), g.indices.end());
    }
  }
  return out;
}

LabelSet BlockPartition::complement(std::span<const std::string> labels) const {
  for (const auto& l : labels) (void)group(l);
  LabelSet out;
  for (const auto& g : groups_) {
    if (std::find(labels.begin(), labels.end(), g.label) == labels.end()) out.push_back(g.label);
  }
  return out;
}

BlockPartition BlockPartition::restricted_to(std::span<const std::string> kept) const {
  std::vector<std::pair<std::string, Index>> sizes;
  for (const auto& g : groups_) {
    if (std::find(kept.begin(), kept.end(), g.label) != kept.end()) {
      sizes.emplace_back(g.label, static_cast<Index>(g.indices.size()));
    }
  }
  return contiguous(sizes);
}

// --- BlockOperatorMatrix --------------------------------------------------

BlockOperatorMatrix::BlockOperatorMatrix(ComplexMatrix matrix, BlockPartition partition)
    : matrix_(std::move(matrix)), partition_(std::move(partition)) {
  if (matrix_.rows() != partition_.size() || matrix_.cols() != partition_.size()) {
    throw Error(ErrorCode::dimension, "matrix dimensions do not match the block partition");
  }
  require_finite(matrix_, "block operator matrix");
}

ComplexMatrix block(const BlockOperatorMatrix& m, std::string_view row_label,
                    std::string_view col_label) {
  const auto& r = m.partition().group(row_label).indices;
  const auto& c = m.partition().group(col_label).indices;
  return submatrix(m.matrix(), r, c);
}

ComplexMatrix block(const BlockOperatorMatrix& m, std::span<const std::string> row_labels,
                    std::span<const std::string> col_labels) {
  const auto r = m.partition().indices_of(row_labels);
  const auto c = m.partition().indices_of(col_labels);
  return submatrix(m.matrix(), r, c);
}

// --- Schur complements ----------------------------------------------------

BlockOperatorMatrix schur_complement(const BlockOperatorMatrix& m, const LabelSet& pivot,
                                     double max_condition, std::string_view stage) {
  const auto& part = m.partition();
  const LabelSet rest = part.complement(pivot);
  const auto p = part.indices_of(pivot);
  const auto c = part.indices_of(rest);
  const ComplexMatrix x_pp = submatrix(m.matrix(), p, p);
  const double cond = condition_number(x_pp);
  if (!(cond < max_condition)) {
    throw SingularPivotError(join(pivot), std::string(stage), cond);
  }
  ComplexMatrix out = lu_complement(submatrix(m.matrix(), c, c), submatrix(m.matrix(), c, p),
                                    x_pp, submatrix(m.matrix(), p, c));
  return BlockOperatorMatrix(std::move(out), part.restricted_to(rest));
}

ComplexMatrix schur_complement(const BlockOperatorMatrix& m, const LabelSet& row_pivot,
                               const LabelSet& col_pivot, double max_condition) {
  const auto& part = m.partition();
  const auto r1 = part.indices_of(row_pivot);
  const auto c1 = part.indices_of(col_pivot);
  if (r1.size() != c1.size()) {
    throw Error(ErrorCode::dimension, "off-diagonal pivot must be square");
  }
  const auto r1c = part.indices_of(part.complement(row_pivot));
  const auto c1c = part.indices_of(part.complement(col_pivot));
  const ComplexMatrix x_pp = submatrix(m.matrix(), r1, c1);
  const double cond = condition_number(x_pp);
  if (!(cond < max_condition)) {
    throw SingularPivotError(join(row_pivot) + "|" + join(col_pivot), "", cond);
  }
  return lu_complement(submatrix(m.matrix(), r1c, c1c), submatrix(m.matrix(), r1c, c1), x_pp,
                       submatrix(m.matrix(), r1, c1c));
}

double default_rank_tol(const ComplexMatrix& a) {
  return static_cast<double>(std::max(a.rows(), a.cols())) *
         std::numeric_limits<double>::epsilon();
}

ComplexMatrix generalized_inverse(const ComplexMatrix& a, std::optional<double> rank_tol) {
  require_finite(a, "generalized_inverse input");
  const double tol = rank_tol.value_or(default_rank_tol(a));
  if (tol < 0.0) throw Error(ErrorCode::invalid_argument, "rank_tol must be non-negative");
  if (a.size() == 0) return ComplexMatrix::Zero(a.cols(), a.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Index r = numerical_rank(sv, tol);
  ComplexMatrix out = ComplexMatrix::Zero(a.cols(), a.rows());
  for (Index i = 0; i < r; ++i) {
    out += (svd.matrixV().col(i) / sv(i)) * svd.matrixU().col(i).adjoint();
  }
  return out;
}

InclusionResult inclusion_check(const ComplexMatrix& sub, const ComplexMatrix& ambient,
                                InclusionMode mode, std::optional<double> rank_tol, double tol) {
  const double rtol = rank_tol.value_or(default_rank_tol(ambient));
  InclusionResult res;
  if (mode == InclusionMode::image) {
    if (sub.rows() != ambient.rows()) {
      throw Error(ErrorCode::dimension, "image inclusion: row counts differ");
    }
    if (sub.size() == 0) return {true, 0.0};
    ComplexMatrix resid = sub;
    if (ambient.size() > 0) {
      const auto svd = full_svd(ambient);
      const Index r = numerical_rank(svd.singularValues(), rtol);
      const auto u = svd.matrixU().leftCols(r);
      resid = sub - u * (u.adjoint() * sub);
    }
    res.residual = resid.norm();
    res.holds = res.residual <= tol * std::max(1.0, sub.norm());
  } else {
    if (sub.cols() != ambient.cols()) {
      throw Error(ErrorCode::dimension, "kernel inclusion: column counts differ");
    }
    if (sub.size() == 0) return {true, 0.0};
    ComplexMatrix kernel_image = sub;
    if (ambient.size() > 0) {
      const auto svd = full_svd(ambient);
      const Index r = numerical_rank(svd.singularValues(), rtol);
      const auto z = svd.matrixV().rightCols(ambient.cols() - r);
      kernel_image = sub * z;
    }
    res.residual = kernel_image.norm();
    res.holds = res.residual <= tol * std::max(1.0, sub.norm());
  }
  return res;
}

BlockOperatorMatrix schur_complement_with_inverse(const BlockOperatorMatrix& m,
                                                  const LabelSet& pivot,
                                                  const ComplexMatrix& pivot_inverse) {
  const auto& part = m.partition();
  const LabelSet rest = part.complement(pivot);
  const auto p = part.indices_of(pivot);
  const auto c = part.indices_of(rest);
  if (pivot_inverse.rows() != static_cast<Index>(p.size()) ||
      pivot_inverse.cols() != static_cast<Index>(p.size())) {
    throw Error(ErrorCode::dimension, "pivot inverse has the wrong shape");
  }
  ComplexMatrix out = submatrix(m.matrix(), c, c) -
                      submatrix(m.matrix(), c, p) * pivot_inverse * submatrix(m.matrix(), p, c);
  return BlockOperatorMatrix(std::move(out), part.restricted_to(rest));
}

BlockOperatorMatrix generalized_schur_complement(const BlockOperatorMatrix& m,
                                                 const LabelSet& pivot,
                                                 std::optional<double> rank_tol) {
  const auto& part = m.partition();
  const LabelSet rest = part.complement(pivot);
  const auto p = part.indices_of(pivot);
  const auto c = part.indices_of(rest);
  const ComplexMatrix g22 = submatrix(m.matrix(), p, p);
  const ComplexMatrix g21 = submatrix(m.matrix(), p, c);
  const ComplexMatrix g12 = submatrix(m.matrix(), c, p);

  const auto img = inclusion_check(g21, g22, InclusionMode::image, rank_tol);
  if (!img.holds) {
    std::ostringstream os;
    os << "generalized Schur complement ill-defined: im(G21) not contained in im(G22), residual "
       << img.residual;
    throw Error(ErrorCode::ill_defined_complement, os.str());
  }
  const auto ker = inclusion_check(g12, g22, InclusionMode::kernel, rank_tol);
  if (!ker.holds) {
    std::ostringstream os;
    os << "generalized Schur complement ill-defined: ker(G22) not contained in ker(G12), residual "
       << ker.residual;
    throw Error(ErrorCode::ill_defined_complement, os.str());
  }
  return schur_complement_with_inverse(m, pivot, generalized_inverse(g22, rank_tol));
}

BlockOperatorMatrix successive_schur(const BlockOperatorMatrix& m, const LabelSet& first_pivot,
                                     const LabelSet& second_pivot, double max_condition) {
  for (const auto& a : first_pivot) {
    if (std::find(second_pivot.begin(), second_pivot.end(), a) != second_pivot.end()) {
      throw Error(ErrorCode::invalid_argument, "successive pivots must be disjoint");
    }
  }
  const auto stage1 = schur_complement(m, first_pivot, max_condition, "first");
  return schur_complement(stage1, second_pivot, max_condition, "second");
}

ComplexMatrix banachiewicz_inverse(const ComplexMatrix& p, const ComplexMatrix& q,
                                   const ComplexMatrix& r, const ComplexMatrix& s,
                                   double max_condition) {
  if (p.rows() != p.cols() || s.rows() != s.cols() || q.rows() != p.rows() ||
      q.cols() != s.cols() || r.rows() != s.rows() || r.cols() != p.cols()) {
    throw Error(ErrorCode::dimension, "banachiewicz_inverse: inconsistent block shapes");
  }
  const double cond_p = condition_number(p);
  if (!(cond_p < max_condition)) throw SingularPivotError("P", "banachiewicz", cond_p);
  Eigen::PartialPivLU<ComplexMatrix> lu_p(p);
  const ComplexMatrix p_inv_q = lu_p.solve(q);
  const ComplexMatrix r_p_inv = r * lu_p.inverse();
  const ComplexMatrix comp = s - r * p_inv_q;
  const double cond_c = condition_number(comp);
  if (!(cond_c < max_condition)) throw SingularPivotError("S-RP^-1Q", "banachiewicz", cond_c);
  const ComplexMatrix comp_inv = Eigen::PartialPivLU<ComplexMatrix>(comp).inverse();

  const Index n1 = p.rows();
  const Index n2 = s.rows();
  ComplexMatrix out(n1 + n2, n1 + n2);
  out.topLeftCorner(n1, n1) = lu_p.inverse() + p_inv_q * comp_inv * r_p_inv;
  out.topRightCorner(n1, n2) = -p_inv_q * comp_inv;
  out.bottomLeftCorner(n2, n1) = -comp_inv * r_p_inv;
  out.bottomRightCorner(n2, n2) = comp_inv;
  return out;
}

}  // namespace qfnred
