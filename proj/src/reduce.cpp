// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qfnred {

namespace {

constexpr const char* kFeedbackStage = "feedback";
constexpr const char* kAdiabaticStage = "adiabatic";
constexpr const char* kJointStage = "joint";

LabelSet labels_of(const std::vector<Index>& channels) {
  LabelSet out;
  out.reserve(channels.size());
  for (Index j : channels) out.push_back(channel_label(j));
  return out;
}

std::vector<Index> channel_rows(const std::vector<Index>& channels, Index d) {
  std::vector<Index> out;
  out.reserve(channels.size() * static_cast<std::size_t>(d));
  for (Index j : channels)
    for (Index i = 0; i < d; ++i) out.push_back(j * d + i);
  return out;
}

std::vector<Index> iota(Index n) {
  std::vector<Index> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

BlockOperatorMatrix staged_complement(const BlockOperatorMatrix& m, const LabelSet& pivot,
                                      const std::string& pivot_name, const char* stage,
                                      double max_condition = kMaxPivotCondition) {
  try {
    return schur_complement(m, pivot, max_condition, stage);
  } catch (const SingularPivotError& e) {
    throw SingularPivotError(pivot_name, stage, e.condition_number());
  }
}

// Splits a "sys", "ch*"-partitioned matrix on an initial space of dimension d
// into a generator, compressing every d-block with v (d x s).
ItoGeneratorMatrix compress(const BlockOperatorMatrix& x, const ComplexMatrix& v,
                            std::vector<ChannelRole> roles) {
  const Index n = static_cast<Index>(roles.size());
  const Index d = v.rows();
  const Index s = v.cols();
  if (x.matrix().rows() != d * (n + 1))
    throw Error(ErrorCode::dimension, "compress: block layout does not match channel count");
  ComplexMatrix e = ComplexMatrix::Zero(d * (n + 1), s * (n + 1));
  e.topLeftCorner(d, s) = v;
  e.bottomRightCorner(d * n, s * n) = channel_embed(v, n);
  const ComplexMatrix c = e.adjoint() * x.matrix() * e;
  ComplexMatrix nn = c.bottomRightCorner(s * n, s * n);
  nn += ComplexMatrix::Identity(s * n, s * n);
  return ItoGeneratorMatrix::unchecked(c.topLeftCorner(s, s), c.topRightCorner(s, s * n),
                                       c.bottomLeftCorner(s * n, s), std::move(nn),
                                       std::move(roles));
}

ItoGeneratorMatrix split(const BlockOperatorMatrix& x, Index d, std::vector<ChannelRole> roles) {
  return compress(x, ComplexMatrix::Identity(d, d), std::move(roles));
}

std::vector<ChannelRole> all_external(std::size_t n) {
  return std::vector<ChannelRole>(n, ChannelRole::external);
}

void require_structure(const ScaledGeneratorFamily& fam, double tol) {
  const ValidationFragment s = validate_structure(fam, tol);
  if (!s.passed())
    throw Error(ErrorCode::structural, "structural conditions violated: " + s.failure_summary());
}

void require_decoupling(const ScaledGeneratorFamily& fam, double tol) {
  const ValidationFragment f = validate_fast_decoupling(fam, tol);
  if (!f.passed())
    throw Error(ErrorCode::fast_decoupling,
                "fast decoupling violated: " + f.failure_summary());
}

}  // namespace

// --- extended generator ---------------------------------------------------

LabelSet ExtendedGeneratorMatrix::internal_labels() const {
  return labels_of(source.channels_with(ChannelRole::internal));
}

LabelSet ExtendedGeneratorMatrix::external_labels() const {
  return labels_of(source.channels_with(ChannelRole::external));
}

ExtendedGeneratorMatrix build_extended_generator(const ScaledGeneratorFamily& fam, double tol) {
  require_structure(fam, tol);
  const Index d = fam.initial_dim();
  const Index n = fam.channels();
  const auto& dec = fam.decomposition();
  const ComplexMatrix& vf = dec.fast_basis();
  const Index f = vf.cols();
  const Index dn = d * n;

  ComplexMatrix ge = ComplexMatrix::Zero(d + f + dn, d + f + dn);
  ge.block(0, 0, d, d) = fam.B();
  ge.block(0, d, d, f) = dec.slow_projector() * fam.A() * vf;
  ge.block(0, d + f, d, dn) = fam.G();
  ge.block(d, 0, f, d) = vf.adjoint() * fam.A();
  ge.block(d, d, f, f) = vf.adjoint() * fam.Y() * vf;
  ge.block(d, d + f, f, dn) = vf.adjoint() * fam.F();
  ge.block(d + f, 0, dn, d) = -fam.N() * fam.G().adjoint();
  ge.block(d + f, d, dn, f) = -fam.N() * fam.F().adjoint() * vf;
  ge.block(d + f, d + f, dn, dn) = fam.N() - ComplexMatrix::Identity(dn, dn);

  std::vector<std::pair<std::string, Index>> sizes{{kSystemBlock, d}, {kFastBlock, f}};
  for (Index j = 0; j < n; ++j) sizes.emplace_back(channel_label(j), d);
  return ExtendedGeneratorMatrix{BlockOperatorMatrix(std::move(ge), BlockPartition::contiguous(sizes)),
                                 fam};
}

// --- single reductions ----------------------------------------------------

ItoGeneratorMatrix feedback_eliminate(const ItoGeneratorMatrix& g, double max_condition) {
  const auto internal = g.channels_with(ChannelRole::internal);
  if (internal.empty()) return g;
  const auto external = g.channels_with(ChannelRole::external);
  BlockOperatorMatrix reduced = [&] {
    try {
      return staged_complement(g.block_matrix(), labels_of(internal), "N_ii - I", kFeedbackStage,
                               max_condition);
    } catch (const SingularPivotError& e) {
      std::ostringstream os;
      os << "ill-posed feedback: N_ii - I is singular (condition number " << e.condition_number()
         << ")";
      throw Error(ErrorCode::ill_posed_network, os.str());
    }
  }();
  return split(reduced, g.initial_dim(), all_external(external.size()));
}

ItoGeneratorMatrix adiabatic_eliminate(const ScaledGeneratorFamily& fam, double tol) {
  const ExtendedGeneratorMatrix ge = build_extended_generator(fam, tol);
  require_decoupling(fam, tol);
  const BlockOperatorMatrix x = staged_complement(ge.matrix, {kFastBlock}, "Y_ff", kAdiabaticStage);
  return compress(x, fam.decomposition().slow_basis(), fam.roles());
}

ScaledGeneratorFamily feedback_eliminate_family(const ScaledGeneratorFamily& fam,
                                                double max_condition) {
  const auto internal = fam.channels_with(ChannelRole::internal);
  if (internal.empty()) return fam;
  const auto external = fam.channels_with(ChannelRole::external);
  const Index d = fam.initial_dim();
  const auto ri = channel_rows(internal, d);
  const auto re = channel_rows(external, d);
  const auto all = iota(d * fam.channels());
  const auto sys = iota(d);

  const ComplexMatrix pivot =
      submatrix(fam.N(), ri, ri) - ComplexMatrix::Identity(static_cast<Index>(ri.size()),
                                                           static_cast<Index>(ri.size()));
  const double cond = condition_number(pivot);
  if (!(cond < max_condition)) {
    std::ostringstream os;
    os << "ill-posed feedback: N_ii - I is singular (condition number " << cond << ")";
    throw Error(ErrorCode::ill_posed_network, os.str());
  }
  Eigen::PartialPivLU<ComplexMatrix> lu(pivot);

  const ComplexMatrix wn_i = lu.solve(submatrix(fam.N(), ri, all));
  const ComplexMatrix wn_ie = lu.solve(submatrix(fam.N(), ri, re));
  const ComplexMatrix f_i = submatrix(fam.F(), sys, ri);
  const ComplexMatrix g_i = submatrix(fam.G(), sys, ri);
  const ComplexMatrix fa = fam.F().adjoint();
  const ComplexMatrix ga = fam.G().adjoint();

  ComplexMatrix y = fam.Y() + f_i * wn_i * fa;
  ComplexMatrix a = fam.A() + f_i * wn_i * ga + g_i * wn_i * fa;
  ComplexMatrix b = fam.B() + g_i * wn_i * ga;
  ComplexMatrix f = submatrix(fam.F(), sys, re) - f_i * wn_ie;
  ComplexMatrix g = submatrix(fam.G(), sys, re) - g_i * wn_ie;
  ComplexMatrix n = submatrix(fam.N(), re, re) - submatrix(fam.N(), re, ri) * wn_ie;
  return ScaledGeneratorFamily::unchecked(std::move(y), std::move(a), std::move(b), std::move(f),
                                          std::move(g), std::move(n), fam.decomposition(),
                                          all_external(external.size()));
}

ValidationFragment validate_feedback_kernel(const ScaledGeneratorFamily& fam, double tol) {
  ValidationFragment frag{"feedback_kernel", {}};
  ComplexMatrix y_hat;
  try {
    y_hat = feedback_eliminate_family(fam).Y();
  } catch (const Error&) {
    frag.add_failure("N_ii - I invertible");
    return frag;
  }
  const auto& dec = fam.decomposition();
  const ComplexMatrix ps = dec.slow_projector();
  const double scale = y_hat.norm();
  frag.add_residual("||P_s Y^||", (ps * y_hat).norm(), scale, tol);
  frag.add_residual("||Y^ P_s||", (y_hat * ps).norm(), scale, tol);
  frag.add_condition("cond(Y^_ff)",
                     condition_number(dec.fast_basis().adjoint() * y_hat * dec.fast_basis()),
                     kMaxPivotCondition);
  return frag;
}

// --- compositions ---------------------------------------------------------

CompositionResult compose_fa(const ScaledGeneratorFamily& fam, double tol) {
  const ExtendedGeneratorMatrix ge = build_extended_generator(fam, tol);
  require_decoupling(fam, tol);
  const LabelSet internal = ge.internal_labels();
  const auto external = fam.channels_with(ChannelRole::external);

  BlockOperatorMatrix x = staged_complement(ge.matrix, {kFastBlock}, "Y_ff", kAdiabaticStage);
  if (!internal.empty())
    x = staged_complement(x, internal, "N^_ii - I", kFeedbackStage);
  const ComplexMatrix& vs = fam.decomposition().slow_basis();
  ItoGeneratorMatrix nested = compress(
      x, vs, internal.empty() ? fam.roles() : all_external(external.size()));
  ItoGeneratorMatrix operational = feedback_eliminate(adiabatic_eliminate(fam, tol));
  const double disc = relative_difference(nested.matrix(), operational.matrix());
  return {std::move(nested), std::move(operational), disc};
}

CompositionResult compose_af(const ScaledGeneratorFamily& fam, double tol) {
  const ExtendedGeneratorMatrix ge = build_extended_generator(fam, tol);
  const LabelSet internal = ge.internal_labels();
  const auto external = fam.channels_with(ChannelRole::external);

  BlockOperatorMatrix x = ge.matrix;
  if (!internal.empty()) {
    x = staged_complement(x, internal, "N_ii - I", kFeedbackStage);
    const ValidationFragment kernel = validate_feedback_kernel(fam, tol);
    if (!kernel.passed())
      throw Error(ErrorCode::structural,
                  "feedback kernel condition violated: " + kernel.failure_summary());
  }
  x = staged_complement(x, {kFastBlock}, internal.empty() ? "Y_ff" : "Y^_ff", kAdiabaticStage);
  const ComplexMatrix& vs = fam.decomposition().slow_basis();
  ItoGeneratorMatrix nested = compress(
      x, vs, internal.empty() ? fam.roles() : all_external(external.size()));
  ItoGeneratorMatrix operational = adiabatic_eliminate(feedback_eliminate_family(fam), tol);
  const double disc = relative_difference(nested.matrix(), operational.matrix());
  return {std::move(nested), std::move(operational), disc};
}

ItoGeneratorMatrix joint_elimination(const ScaledGeneratorFamily& fam, double tol) {
  const ExtendedGeneratorMatrix ge = build_extended_generator(fam, tol);
  LabelSet pivot{kFastBlock};
  const LabelSet internal = ge.internal_labels();
  pivot.insert(pivot.end(), internal.begin(), internal.end());
  const BlockOperatorMatrix x = staged_complement(
      ge.matrix, pivot, "[[Y_ff, F_fi], [-N_i F_f*, N_ii - I]]", kJointStage);
  const auto external = fam.channels_with(ChannelRole::external);
  return compress(x, fam.decomposition().slow_basis(),
                  internal.empty() ? fam.roles() : all_external(external.size()));
}

ReductionReport check_commutativity(const ScaledGeneratorFamily& fam, double tol) {
  ReductionReport rep;
  rep.operation = "commute";
  rep.tol = tol;
  rep.input.kind = "scaled_family";
  rep.input.initial_dim = fam.initial_dim();
  rep.input.channels = fam.channels();
  rep.input.slow_dim = fam.decomposition().slow_dim();
  rep.input.roles = fam.roles();

  rep.validations.push_back(validate_structure(fam, tol));
  rep.validations.push_back(validate_fast_decoupling(fam, tol));
  rep.validations.push_back(validate_feedback_kernel(fam, tol));

  auto fail = [&](const std::string& what, const Error& e) {
    rep.notes.push_back(what + " undefined: " + e.what());
    // the most severe stage wins: structural over ill-posed over validation
    const ReportStatus s = status_for(e);
    if (!rep.error || static_cast<int>(s) > static_cast<int>(rep.status)) {
      rep.error = what + ": " + e.what();
      rep.status = std::max(rep.status, s);
    }
  };
  auto add_hp = [&](const std::string& name, const ItoGeneratorMatrix& g) {
    ValidationFragment hp = validate_hp(g, tol);
    hp.name = "hp[" + name + "]";
    rep.validations.push_back(std::move(hp));
  };

  std::optional<ItoGeneratorMatrix> fa, af, joint;
  try {
    CompositionResult r = compose_fa(fam, tol);
    rep.add_residual("path_discrepancy(FA)", r.discrepancy);
    fa = std::move(r.nested);
  } catch (const Error& e) {
    fail("FA", e);
  }
  try {
    CompositionResult r = compose_af(fam, tol);
    rep.add_residual("path_discrepancy(AF)", r.discrepancy);
    af = std::move(r.nested);
  } catch (const Error& e) {
    fail("AF", e);
  }
  try {
    joint = joint_elimination(fam, tol);
  } catch (const Error& e) {
    fail("joint", e);
  }
  if (fa) add_hp("FA", *fa);
  if (af) add_hp("AF", *af);
  if (joint) add_hp("joint", *joint);

  if (fa && af && joint) {
    const double d1 = relative_difference(fa->matrix(), af->matrix());
    const double d2 = relative_difference(fa->matrix(), joint->matrix());
    const double d3 = relative_difference(af->matrix(), joint->matrix());
    rep.add_residual("deviation(FA,AF)", d1);
    rep.add_residual("deviation(FA,joint)", d2);
    rep.add_residual("deviation(AF,joint)", d3);
    const double worst = std::max({d1, d2, d3});
    rep.add_residual("max_deviation", worst);
    if (!(worst < tol) && rep.status == ReportStatus::pass) {
      rep.status = ReportStatus::validation_failure;
      std::ostringstream os;
      os << "orders disagree: max deviation " << worst << " >= " << tol;
      rep.error = os.str();
    }
  }
  if (rep.status == ReportStatus::pass && !rep.all_validations_passed()) {
    rep.status = ReportStatus::validation_failure;
    rep.error = "output validation failed";
  }
  if (fa) rep.outputs.emplace_back("FA", std::move(*fa));
  if (af) rep.outputs.emplace_back("AF", std::move(*af));
  if (joint) rep.outputs.emplace_back("joint", std::move(*joint));
  return rep;
}

}  // namespace qfnred
