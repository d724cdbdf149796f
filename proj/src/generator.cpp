// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

namespace qfnred {

// --- ValidationFragment ---------------------------------------------------

bool ValidationFragment::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const ValidationCheck* ValidationFragment::find(const std::string& check_name) const {
  for (const auto& c : checks)
    if (c.name == check_name) return &c;
  return nullptr;
}

void ValidationFragment::add_residual(std::string check_name, double residual, double scale,
                                      double tol) {
  const double threshold = tol * std::max(1.0, scale);
  checks.push_back({std::move(check_name), residual, threshold,
                    std::isfinite(residual) && residual <= threshold});
}

void ValidationFragment::add_condition(std::string check_name, double condition, double limit) {
  checks.push_back({std::move(check_name), condition, limit, condition < limit});
}

void ValidationFragment::add_failure(std::string check_name) {
  checks.push_back({std::move(check_name), std::numeric_limits<double>::infinity(), 0.0, false});
}

std::string ValidationFragment::failure_summary() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!first) os << "; ";
    first = false;
    os << c.name << ": " << c.residual << " > " << c.threshold;
  }
  return os.str();
}

// --- helpers --------------------------------------------------------------

const char* to_string(ChannelRole role) {
  return role == ChannelRole::internal ? "internal" : "external";
}

std::string channel_label(Index j) { return "ch" + std::to_string(j); }

ComplexMatrix channel_embed(const ComplexMatrix& v, Index channels) {
  ComplexMatrix out = ComplexMatrix::Zero(v.rows() * channels, v.cols() * channels);
  for (Index j = 0; j < channels; ++j) out.block(j * v.rows(), j * v.cols(), v.rows(), v.cols()) = v;
  return out;
}

namespace {

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

void require_shape(const ComplexMatrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << what << " must be " << rows << "x" << cols << ", got " << m.rows() << "x" << m.cols();
    throw Error(ErrorCode::dimension, os.str());
  }
  require_finite(m, what);
}

void add_unitarity(ValidationFragment& frag, const std::string& name, const ComplexMatrix& u,
                   double tol) {
  const ComplexMatrix id = identity(u.rows());
  const double scale = std::sqrt(static_cast<double>(u.rows()));
  frag.add_residual("||" + name + name + "* - I||", (u * u.adjoint() - id).norm(), scale, tol);
  frag.add_residual("||" + name + "*" + name + " - I||", (u.adjoint() * u - id).norm(), scale, tol);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

std::vector<Index> select_channels(const std::vector<ChannelRole>& roles, ChannelRole role) {
  std::vector<Index> out;
  for (size_t j = 0; j < roles.size(); ++j)
    if (roles[j] == role) out.push_back(static_cast<Index>(j));
  return out;
}

}  // namespace

// --- ItoGeneratorMatrix ---------------------------------------------------

ItoGeneratorMatrix::ItoGeneratorMatrix(ComplexMatrix k, ComplexMatrix l, ComplexMatrix m,
                                       ComplexMatrix n, std::vector<ChannelRole> roles)
    : d_(k.rows()),
      k_(std::move(k)),
      l_(std::move(l)),
      m_(std::move(m)),
      n_(std::move(n)),
      roles_(std::move(roles)) {}

ItoGeneratorMatrix ItoGeneratorMatrix::unchecked(ComplexMatrix k, ComplexMatrix l,
                                                 ComplexMatrix m, ComplexMatrix n,
                                                 std::vector<ChannelRole> roles) {
  const Index d = k.rows();
  const Index dn = d * static_cast<Index>(roles.size());
  require_shape(k, d, d, "K");
  require_shape(l, d, dn, "L");
  require_shape(m, dn, d, "M");
  require_shape(n, dn, dn, "N");
  return ItoGeneratorMatrix(std::move(k), std::move(l), std::move(m), std::move(n),
                            std::move(roles));
}

ItoGeneratorMatrix ItoGeneratorMatrix::make(ComplexMatrix k, ComplexMatrix l, ComplexMatrix m,
                                            ComplexMatrix n, std::vector<ChannelRole> roles,
                                            double tol) {
  auto g = unchecked(std::move(k), std::move(l), std::move(m), std::move(n), std::move(roles));
  const auto frag = validate_hp(g, tol);
  if (!frag.passed()) {
    throw Error(ErrorCode::validation,
                "Hudson-Parthasarathy conditions violated: " + frag.failure_summary());
  }
  return g;
}

ItoGeneratorMatrix ItoGeneratorMatrix::trivial(Index d, Index n) {
  return ItoGeneratorMatrix(ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d * n),
                            ComplexMatrix::Zero(d * n, d), identity(d * n),
                            std::vector<ChannelRole>(static_cast<size_t>(n),
                                                     ChannelRole::external));
}

std::vector<Index> ItoGeneratorMatrix::channels_with(ChannelRole role) const {
  return select_channels(roles_, role);
}

ComplexMatrix ItoGeneratorMatrix::matrix() const {
  const Index dn = n_.rows();
  ComplexMatrix g(d_ + dn, d_ + dn);
  g.topLeftCorner(d_, d_) = k_;
  g.topRightCorner(d_, dn) = l_;
  g.bottomLeftCorner(dn, d_) = m_;
  g.bottomRightCorner(dn, dn) = n_ - identity(dn);
  return g;
}

BlockOperatorMatrix ItoGeneratorMatrix::block_matrix() const {
  std::vector<std::pair<std::string, Index>> sizes{{"sys", d_}};
  for (Index j = 0; j < channels(); ++j) sizes.emplace_back(channel_label(j), d_);
  return BlockOperatorMatrix(matrix(), BlockPartition::contiguous(sizes));
}

bool operator==(const ItoGeneratorMatrix& a, const ItoGeneratorMatrix& b) {
  return a.roles_ == b.roles_ && same_matrix(a.k_, b.k_) && same_matrix(a.l_, b.l_) &&
         same_matrix(a.m_, b.m_) && same_matrix(a.n_, b.n_);
}

ValidationFragment validate_hp(const ItoGeneratorMatrix& g, double tol) {
  ValidationFragment frag{"hudson_parthasarathy", {}};
  add_unitarity(frag, "N", g.N(), tol);
  const ComplexMatrix llstar = g.L() * g.L().adjoint();
  frag.add_residual("||K + K* + LL*||", (g.K() + g.K().adjoint() + llstar).norm(),
                    2.0 * g.K().norm() + llstar.norm(), tol);
  const ComplexMatrix nlstar = g.N() * g.L().adjoint();
  frag.add_residual("||M + NL*||", (g.M() + nlstar).norm(), g.M().norm() + nlstar.norm(), tol);
  return frag;
}

// --- SLH, concatenation, relabeling ---------------------------------------

ItoGeneratorMatrix from_slh(const SlhTriple& t, double tol) {
  const Index d = t.H.rows();
  const Index n = static_cast<Index>(t.roles.size());
  require_shape(t.H, d, d, "H");
  require_shape(t.S, d * n, d * n, "S");
  require_shape(t.C, d * n, d, "C");

  ValidationFragment frag{"slh", {}};
  add_unitarity(frag, "S", t.S, tol);
  frag.add_residual("||H - H*||", (t.H - t.H.adjoint()).norm(), t.H.norm(), tol);
  if (!frag.passed()) {
    throw Error(ErrorCode::validation, "invalid SLH triple: " + frag.failure_summary());
  }

  const Complex i(0.0, 1.0);
  ComplexMatrix n_mat = t.S.adjoint();
  ComplexMatrix l = t.C.adjoint();
  ComplexMatrix k = -0.5 * l * l.adjoint() + i * t.H;
  ComplexMatrix m = -n_mat * l.adjoint();
  return ItoGeneratorMatrix::make(std::move(k), std::move(l), std::move(m), std::move(n_mat),
                                  t.roles, tol);
}

ItoGeneratorMatrix concatenate(const ItoGeneratorMatrix& g1, const ItoGeneratorMatrix& g2,
                               Index max_size) {
  const Index d1 = g1.initial_dim(), d2 = g2.initial_dim();
  const Index n1 = g1.channels(), n2 = g2.channels();
  if (d1 * d2 * (n1 + n2 + 1) > max_size) {
    std::ostringstream os;
    os << "concatenated generator size " << d1 * d2 * (n1 + n2 + 1) << " exceeds cap "
       << max_size;
    throw Error(ErrorCode::dimension, os.str());
  }
  const Index d = d1 * d2;
  const Index n = n1 + n2;
  const ComplexMatrix i1 = identity(d1), i2 = identity(d2);

  ComplexMatrix k = kron(g1.K(), i2) + kron(i1, g2.K());
  ComplexMatrix l(d, d * n), m(d * n, d);
  ComplexMatrix nm = ComplexMatrix::Zero(d * n, d * n);
  for (Index j = 0; j < n1; ++j) {
    l.middleCols(j * d, d) = kron(g1.L(j), i2);
    m.middleRows(j * d, d) = kron(g1.M(j), i2);
    for (Index q = 0; q < n1; ++q) nm.block(j * d, q * d, d, d) = kron(g1.N(j, q), i2);
  }
  for (Index j = 0; j < n2; ++j) {
    const Index jj = n1 + j;
    l.middleCols(jj * d, d) = kron(i1, g2.L(j));
    m.middleRows(jj * d, d) = kron(i1, g2.M(j));
    for (Index q = 0; q < n2; ++q) nm.block(jj * d, (n1 + q) * d, d, d) = kron(i1, g2.N(j, q));
  }
  std::vector<ChannelRole> roles = g1.roles();
  roles.insert(roles.end(), g2.roles().begin(), g2.roles().end());
  return ItoGeneratorMatrix::unchecked(std::move(k), std::move(l), std::move(m), std::move(nm),
                                       std::move(roles));
}

ItoGeneratorMatrix relabel_channels(const ItoGeneratorMatrix& g,
                                    const std::vector<Index>& permutation,
                                    std::vector<ChannelRole> roles) {
  const Index n = g.channels();
  const Index d = g.initial_dim();
  if (static_cast<Index>(permutation.size()) != n || static_cast<Index>(roles.size()) != n) {
    throw Error(ErrorCode::invalid_argument, "permutation and roles must have one entry per channel");
  }
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (Index p : permutation) {
    if (p < 0 || p >= n || seen[static_cast<size_t>(p)]) {
      throw Error(ErrorCode::invalid_argument, "invalid channel permutation");
    }
    seen[static_cast<size_t>(p)] = true;
  }
  ComplexMatrix l(d, d * n), m(d * n, d), nm(d * n, d * n);
  for (Index j = 0; j < n; ++j) {
    l.middleCols(j * d, d) = g.L(permutation[j]);
    m.middleRows(j * d, d) = g.M(permutation[j]);
    for (Index q = 0; q < n; ++q) nm.block(j * d, q * d, d, d) = g.N(permutation[j], permutation[q]);
  }
  return ItoGeneratorMatrix::unchecked(g.K(), std::move(l), std::move(m), std::move(nm),
                                       std::move(roles));
}

// --- SubspaceDecomposition ------------------------------------------------

SubspaceDecomposition SubspaceDecomposition::from_slow_basis(const ComplexMatrix& slow_basis) {
  require_finite(slow_basis, "slow basis");
  const Index d = slow_basis.rows();
  const Index s = slow_basis.cols();
  if (s > d) throw Error(ErrorCode::dimension, "slow basis has more columns than rows");
  const double gram = (slow_basis.adjoint() * slow_basis - identity(s)).norm();
  if (!(gram <= 1e-10)) {
    std::ostringstream os;
    os << "slow basis is not orthonormal: ||V*V - I|| = " << gram;
    throw Error(ErrorCode::validation, os.str());
  }
  ComplexMatrix fast(d, d - s);
  if (d > s) {
    Eigen::HouseholderQR<ComplexMatrix> qr(slow_basis);
    const ComplexMatrix q = qr.householderQ() * identity(d);
    fast = q.rightCols(d - s);
  }
  return SubspaceDecomposition(slow_basis, std::move(fast));
}

bool operator==(const SubspaceDecomposition& a, const SubspaceDecomposition& b) {
  return same_matrix(a.slow_, b.slow_) && same_matrix(a.fast_, b.fast_);
}

// --- ScaledGeneratorFamily ------------------------------------------------

ScaledGeneratorFamily::ScaledGeneratorFamily(ComplexMatrix y, ComplexMatrix a, ComplexMatrix b,
                                             ComplexMatrix f, ComplexMatrix g, ComplexMatrix n,
                                             SubspaceDecomposition decomp,
                                             std::vector<ChannelRole> roles)
    : y_(std::move(y)),
      a_(std::move(a)),
      b_(std::move(b)),
      f_(std::move(f)),
      g_(std::move(g)),
      n_(std::move(n)),
      decomp_(std::move(decomp)),
      roles_(std::move(roles)) {}

ScaledGeneratorFamily ScaledGeneratorFamily::unchecked(ComplexMatrix y, ComplexMatrix a,
                                                       ComplexMatrix b, ComplexMatrix f,
                                                       ComplexMatrix g, ComplexMatrix n,
                                                       SubspaceDecomposition decomp,
                                                       std::vector<ChannelRole> roles) {
  const Index d = y.rows();
  const Index dn = d * static_cast<Index>(roles.size());
  require_shape(y, d, d, "Y");
  require_shape(a, d, d, "A");
  require_shape(b, d, d, "B");
  require_shape(f, d, dn, "F");
  require_shape(g, d, dn, "G");
  require_shape(n, dn, dn, "N");
  if (decomp.dim() != d) {
    throw Error(ErrorCode::dimension, "slow basis dimension does not match the initial space");
  }
  return ScaledGeneratorFamily(std::move(y), std::move(a), std::move(b), std::move(f),
                               std::move(g), std::move(n), std::move(decomp), std::move(roles));
}

ScaledGeneratorFamily ScaledGeneratorFamily::make(ComplexMatrix y, ComplexMatrix a,
                                                  ComplexMatrix b, ComplexMatrix f,
                                                  ComplexMatrix g, ComplexMatrix n,
                                                  SubspaceDecomposition decomp,
                                                  std::vector<ChannelRole> roles, double tol) {
  auto fam = unchecked(std::move(y), std::move(a), std::move(b), std::move(f), std::move(g),
                       std::move(n), std::move(decomp), std::move(roles));
  const auto frag = validate_family_hp(fam, tol);
  if (!frag.passed()) {
    throw Error(ErrorCode::validation,
                "scaled family violates the component identities: " + frag.failure_summary());
  }
  return fam;
}

std::vector<Index> ScaledGeneratorFamily::channels_with(ChannelRole role) const {
  return select_channels(roles_, role);
}

ScaledGeneratorFamily ScaledGeneratorFamily::with_roles(std::vector<ChannelRole> roles) const {
  if (roles.size() != roles_.size()) {
    throw Error(ErrorCode::invalid_argument, "role list must have one entry per channel");
  }
  ScaledGeneratorFamily out = *this;
  out.roles_ = std::move(roles);
  return out;
}

bool operator==(const ScaledGeneratorFamily& a, const ScaledGeneratorFamily& b) {
  return a.roles_ == b.roles_ && a.decomp_ == b.decomp_ && same_matrix(a.y_, b.y_) &&
         same_matrix(a.a_, b.a_) && same_matrix(a.b_, b.b_) && same_matrix(a.f_, b.f_) &&
         same_matrix(a.g_, b.g_) && same_matrix(a.n_, b.n_);
}

ValidationFragment validate_family_hp(const ScaledGeneratorFamily& fam, double tol) {
  ValidationFragment frag{"component_identities", {}};
  add_unitarity(frag, "N", fam.N(), tol);
  const auto& f = fam.F();
  const auto& g = fam.G();
  const ComplexMatrix gg = g * g.adjoint();
  const ComplexMatrix fg = f * g.adjoint() + g * f.adjoint();
  const ComplexMatrix ff = f * f.adjoint();
  frag.add_residual("||B + B* + GG*||", (fam.B() + fam.B().adjoint() + gg).norm(),
                    2.0 * fam.B().norm() + gg.norm(), tol);
  frag.add_residual("||A + A* + FG* + GF*||", (fam.A() + fam.A().adjoint() + fg).norm(),
                    2.0 * fam.A().norm() + fg.norm(), tol);
  frag.add_residual("||Y + Y* + FF*||", (fam.Y() + fam.Y().adjoint() + ff).norm(),
                    2.0 * fam.Y().norm() + ff.norm(), tol);
  return frag;
}

ItoGeneratorMatrix instantiate(const ScaledGeneratorFamily& fam, double k, double tol) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorCode::invalid_argument, "scaling parameter k must be positive and finite");
  }
  ComplexMatrix kk = (k * k) * fam.Y() + k * fam.A() + fam.B();
  ComplexMatrix l = k * fam.F() + fam.G();
  ComplexMatrix m = -fam.N() * l.adjoint();
  return ItoGeneratorMatrix::make(std::move(kk), std::move(l), std::move(m), fam.N(), fam.roles(),
                                  tol);
}

ComplexMatrix hamiltonian_part(const ComplexMatrix& x) {
  return (x - x.adjoint()) / Complex(0.0, 2.0);
}

ValidationFragment validate_structure(const ScaledGeneratorFamily& fam, double tol) {
  ValidationFragment frag{"structure", {}};
  const auto& dec = fam.decomposition();
  const ComplexMatrix& vs = dec.slow_basis();
  const ComplexMatrix& vf = dec.fast_basis();
  const ComplexMatrix ps = dec.slow_projector();
  const ComplexMatrix pf = dec.fast_projector();

  frag.add_residual("||P_s F||", (vs.adjoint() * fam.F()).norm(), fam.F().norm(), tol);
  frag.add_residual("||Y - P_f Y P_f||", (fam.Y() - pf * fam.Y() * pf).norm(), fam.Y().norm(),
                    tol);
  const ComplexMatrix y_ff = vf.adjoint() * fam.Y() * vf;
  frag.add_condition("cond(Y_ff)", condition_number(y_ff), kMaxPivotCondition);

  const ComplexMatrix h1 = hamiltonian_part(fam.A());
  const ComplexMatrix h2 = hamiltonian_part(fam.Y());
  frag.add_residual("||P_s H1 P_s||", (vs.adjoint() * h1 * vs).norm(), h1.norm(), tol);
  frag.add_residual("||P_s H2||", (ps * h2).norm(), h2.norm(), tol);
  frag.add_residual("||H2 P_s||", (h2 * ps).norm(), h2.norm(), tol);

  for (auto& c : validate_family_hp(fam, tol).checks) frag.checks.push_back(std::move(c));
  return frag;
}

FastLimitBlocks fast_limit_blocks(const ScaledGeneratorFamily& fam) {
  const auto& dec = fam.decomposition();
  const Index n = fam.channels();
  const ComplexMatrix& vs = dec.slow_basis();
  const ComplexMatrix& vf = dec.fast_basis();
  const ComplexMatrix y_ff = vf.adjoint() * fam.Y() * vf;
  const double cond = condition_number(y_ff);
  if (!(cond < kMaxPivotCondition)) throw SingularPivotError("Y_ff", "fast_limit", cond);
  Eigen::PartialPivLU<ComplexMatrix> lu(y_ff);

  const ComplexMatrix a_sf = vs.adjoint() * fam.A() * vf;
  const ComplexMatrix f_f = vf.adjoint() * fam.F();
  const ComplexMatrix g_s = vs.adjoint() * fam.G();

  FastLimitBlocks out;
  out.L_hat = g_s - a_sf * lu.solve(f_f);
  out.N_hat = fam.N() + fam.N() * f_f.adjoint() * lu.solve(f_f);
  const ComplexMatrix es = channel_embed(vs, n);
  const ComplexMatrix ef = channel_embed(vf, n);
  out.L_hat_slow = out.L_hat * es;
  out.L_hat_fast = out.L_hat * ef;
  out.N_hat_ss = es.adjoint() * out.N_hat * es;
  out.N_hat_sf = es.adjoint() * out.N_hat * ef;
  out.N_hat_fs = ef.adjoint() * out.N_hat * es;
  out.N_hat_ff = ef.adjoint() * out.N_hat * ef;
  return out;
}

ValidationFragment validate_fast_decoupling(const ScaledGeneratorFamily& fam, double tol) {
  ValidationFragment frag{"fast_decoupling", {}};
  FastLimitBlocks hat;
  try {
    hat = fast_limit_blocks(fam);
  } catch (const SingularPivotError&) {
    frag.add_failure("Y_ff invertible");
    return frag;
  }
  frag.add_residual("||L^_f||", hat.L_hat_fast.norm(), hat.L_hat.norm(), tol);
  frag.add_residual("||N^_sf||", hat.N_hat_sf.norm(), hat.N_hat.norm(), tol);
  frag.add_residual("||N^_fs||", hat.N_hat_fs.norm(), hat.N_hat.norm(), tol);
  add_unitarity(frag, "N^_ss", hat.N_hat_ss, tol);
  add_unitarity(frag, "N^_ff", hat.N_hat_ff, tol);
  return frag;
}

}  // namespace qfnred
