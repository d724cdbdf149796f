// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/spec_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace qfnred {

namespace detail {

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse, where + ": " + what);
}

const Json& field(const Json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) parse_error(where, std::string("missing field \"") + name + "\"");
  return *it;
}

Index dim_field(const Json& dims, const char* name, bool allow_zero) {
  const Json& v = field(dims, name, "dims");
  if (!v.is_number_integer()) parse_error(std::string("dims.") + name, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < (allow_zero ? 0 : 1) || x > 4096)
    parse_error(std::string("dims.") + name, "out of range");
  return static_cast<Index>(x);
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_error(where, "expected a [re, im] pair");
  const double re = j[0].get<double>();
  const double im = j[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) parse_error(where, "non-finite entry");
  return {re, im};
}

Json blocks_row_to_json(const ComplexMatrix& m, Index d, Index n, bool columns) {
  Json out = Json::array();
  for (Index j = 0; j < n; ++j)
    out.push_back(columns ? matrix_to_json(m.middleCols(j * d, d))
                           : matrix_to_json(m.middleRows(j * d, d)));
  return out;
}

// n-list of d x d blocks concatenated horizontally (L-like) or vertically (M-like).
ComplexMatrix blocks_row_from_json(const Json& j, Index d, Index n, bool columns,
                                   const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    parse_error(where, "expected a list of " + std::to_string(n) + " blocks");
  ComplexMatrix out = columns ? ComplexMatrix(d, d * n) : ComplexMatrix(d * n, d);
  for (Index k = 0; k < n; ++k) {
    const ComplexMatrix b =
        matrix_from_json(j[static_cast<std::size_t>(k)], d, d, where + "[" + std::to_string(k) + "]");
    if (columns)
      out.middleCols(k * d, d) = b;
    else
      out.middleRows(k * d, d) = b;
  }
  return out;
}

Json grid_to_json(const ComplexMatrix& m, Index d, Index n) {
  Json out = Json::array();
  for (Index i = 0; i < n; ++i) {
    Json row = Json::array();
    for (Index j = 0; j < n; ++j) row.push_back(matrix_to_json(m.block(i * d, j * d, d, d)));
    out.push_back(std::move(row));
  }
  return out;
}

ComplexMatrix grid_from_json(const Json& j, Index d, Index n, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    parse_error(where, "expected " + std::to_string(n) + " block rows");
  ComplexMatrix out(d * n, d * n);
  for (Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != n)
      parse_error(rw, "expected " + std::to_string(n) + " blocks");
    for (Index k = 0; k < n; ++k)
      out.block(i * d, k * d, d, d) = matrix_from_json(row[static_cast<std::size_t>(k)], d, d,
                                                       rw + "[" + std::to_string(k) + "]");
  }
  return out;
}

Json roles_to_json(const std::vector<ChannelRole>& roles) {
  Json out = Json::array();
  for (ChannelRole r : roles) out.push_back(to_string(r));
  return out;
}

std::vector<ChannelRole> roles_from_json(const Json& j, Index n) {
  if (!j.is_array() || static_cast<Index>(j.size()) != n)
    parse_error("channel_roles", "expected " + std::to_string(n) + " entries");
  std::vector<ChannelRole> out;
  for (const auto& r : j) {
    if (r == "external")
      out.push_back(ChannelRole::external);
    else if (r == "internal")
      out.push_back(ChannelRole::internal);
    else
      parse_error("channel_roles", "expected \"external\" or \"internal\"");
  }
  return out;
}

Json header(SpecKind kind, Index d, Index n, std::optional<Index> slow_dim,
            const std::vector<ChannelRole>& roles) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(kind);
  Json dims;
  dims["d"] = d;
  dims["n"] = n;
  if (slow_dim) dims["slow_dim"] = *slow_dim;
  j["dims"] = std::move(dims);
  j["channel_roles"] = roles_to_json(roles);
  return j;
}

// Wraps constructor errors so every failure surfaces as a parse error.
template <class F>
auto build(const char* what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(ErrorCode::parse, std::string(what) + ": " + e.what());
  }
}

bool is_flat(const Json& j) {
  if (!j.is_array()) return true;
  for (const auto& e : j) {
    if (e.is_object()) return false;
    if (e.is_array())
      for (const auto& x : e)
        if (x.is_structured()) return false;
  }
  return true;
}

void pretty(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
  const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + Json(it.key()).dump() + ": ";
      pretty(it.value(), depth + 1, out);
      if (i + 1 < j.size()) out += ",";
      out += "\n";
    }
    out += close_pad + "}";
  } else if (j.is_array() && !j.empty() && !is_flat(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      pretty(j[i], depth + 1, out);
      if (i + 1 < j.size()) out += ",";
      out += "\n";
    }
    out += close_pad + "]";
  } else {
    out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
  }
}

}  // namespace

std::string dump_pretty(const Json& j) {
  std::string out;
  pretty(j, 0, out);
  out += "\n";
  return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    parse_error(where, "expected " + std::to_string(rows) + " rows");
  ComplexMatrix out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      parse_error(rw, "expected " + std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c)
      out(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
  }
  return out;
}

Json spec_to_json(const NetworkSpec& spec) {
  const Index d = spec.initial_dim();
  const Index n = spec.channels();
  if (const auto* g = std::get_if<ItoGeneratorMatrix>(&spec.value)) {
    Json j = header(SpecKind::generator, d, n, std::nullopt, g->roles());
    j["K"] = matrix_to_json(g->K());
    j["L"] = blocks_row_to_json(g->L(), d, n, true);
    j["M"] = blocks_row_to_json(g->M(), d, n, false);
    j["N"] = grid_to_json(g->N(), d, n);
    return j;
  }
  if (const auto* t = std::get_if<SlhTriple>(&spec.value)) {
    Json j = header(SpecKind::slh, d, n, std::nullopt, t->roles);
    j["S"] = grid_to_json(t->S, d, n);
    j["C"] = blocks_row_to_json(t->C, d, n, false);
    j["H"] = matrix_to_json(t->H);
    return j;
  }
  const auto& f = std::get<ScaledGeneratorFamily>(spec.value);
  Json j = header(SpecKind::scaled_family, d, n, spec.slow_dim(), f.roles());
  j["Y"] = matrix_to_json(f.Y());
  j["A"] = matrix_to_json(f.A());
  j["B"] = matrix_to_json(f.B());
  j["F"] = blocks_row_to_json(f.F(), d, n, true);
  j["G"] = blocks_row_to_json(f.G(), d, n, true);
  j["N"] = grid_to_json(f.N(), d, n);
  j["slow_basis"] = matrix_to_json(f.decomposition().slow_basis().transpose());
  return j;
}

NetworkSpec spec_from_json(const Json& j) {
  if (!j.is_object()) parse_error("document", "expected a JSON object");
  const Json& version = field(j, "schema_version", "document");
  if (version != kSchemaVersion)
    parse_error("schema_version", std::string("unsupported, expected \"") + kSchemaVersion + "\"");
  const Json& kind = field(j, "kind", "document");
  const Json& dims = field(j, "dims", "document");
  if (!dims.is_object()) parse_error("dims", "expected an object");
  const Index d = dim_field(dims, "d", false);
  const Index n = dim_field(dims, "n", true);
  auto roles = roles_from_json(field(j, "channel_roles", "document"), n);

  if (kind == "generator") {
    ComplexMatrix k = matrix_from_json(field(j, "K", "document"), d, d, "K");
    ComplexMatrix l = blocks_row_from_json(field(j, "L", "document"), d, n, true, "L");
    ComplexMatrix m = blocks_row_from_json(field(j, "M", "document"), d, n, false, "M");
    ComplexMatrix nn = grid_from_json(field(j, "N", "document"), d, n, "N");
    return {build("generator", [&] {
      return ItoGeneratorMatrix::unchecked(std::move(k), std::move(l), std::move(m),
                                           std::move(nn), std::move(roles));
    })};
  }
  if (kind == "slh") {
    SlhTriple t;
    t.S = grid_from_json(field(j, "S", "document"), d, n, "S");
    t.C = blocks_row_from_json(field(j, "C", "document"), d, n, false, "C");
    t.H = matrix_from_json(field(j, "H", "document"), d, d, "H");
    t.roles = std::move(roles);
    return {std::move(t)};
  }
  if (kind == "scaled_family") {
    const Index s = dim_field(dims, "slow_dim", false);
    if (s > d) parse_error("dims.slow_dim", "exceeds d");
    ComplexMatrix y = matrix_from_json(field(j, "Y", "document"), d, d, "Y");
    ComplexMatrix a = matrix_from_json(field(j, "A", "document"), d, d, "A");
    ComplexMatrix b = matrix_from_json(field(j, "B", "document"), d, d, "B");
    ComplexMatrix f = blocks_row_from_json(field(j, "F", "document"), d, n, true, "F");
    ComplexMatrix g = blocks_row_from_json(field(j, "G", "document"), d, n, true, "G");
    ComplexMatrix nn = grid_from_json(field(j, "N", "document"), d, n, "N");
    const ComplexMatrix basis =
        matrix_from_json(field(j, "slow_basis", "document"), s, d, "slow_basis").transpose();
    return {build("scaled_family", [&] {
      return ScaledGeneratorFamily::unchecked(std::move(y), std::move(a), std::move(b),
                                              std::move(f), std::move(g), std::move(nn),
                                              SubspaceDecomposition::from_slow_basis(basis),
                                              std::move(roles));
    })};
  }
  parse_error("kind", "expected \"generator\", \"slh\" or \"scaled_family\"");
}

}  // namespace detail

const char* to_string(SpecKind kind) {
  switch (kind) {
    case SpecKind::generator: return "generator";
    case SpecKind::slh: return "slh";
    case SpecKind::scaled_family: return "scaled_family";
  }
  return "unknown";
}

SpecKind NetworkSpec::kind() const {
  if (std::holds_alternative<ItoGeneratorMatrix>(value)) return SpecKind::generator;
  if (std::holds_alternative<SlhTriple>(value)) return SpecKind::slh;
  return SpecKind::scaled_family;
}

Index NetworkSpec::initial_dim() const {
  if (const auto* g = std::get_if<ItoGeneratorMatrix>(&value)) return g->initial_dim();
  if (const auto* t = std::get_if<SlhTriple>(&value)) return t->H.rows();
  return std::get<ScaledGeneratorFamily>(value).initial_dim();
}

Index NetworkSpec::channels() const { return static_cast<Index>(roles().size()); }

Index NetworkSpec::slow_dim() const {
  if (const auto* f = std::get_if<ScaledGeneratorFamily>(&value))
    return f->decomposition().slow_dim();
  return 0;
}

std::vector<ChannelRole> NetworkSpec::roles() const {
  if (const auto* g = std::get_if<ItoGeneratorMatrix>(&value)) return g->roles();
  if (const auto* t = std::get_if<SlhTriple>(&value)) return t->roles;
  return std::get<ScaledGeneratorFamily>(value).roles();
}

NetworkSpec parse_spec(std::string_view text) {
  detail::Json j;
  try {
    j = detail::Json::parse(text.begin(), text.end());
  } catch (const detail::Json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed JSON: ") + e.what());
  }
  return detail::spec_from_json(j);
}

NetworkSpec load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "cannot read " + path);
  return parse_spec(ss.str());
}

std::string emit_spec(const NetworkSpec& spec) { return detail::dump_pretty(detail::spec_to_json(spec)); }

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot replace " + path);
  }
}

void save_spec(const NetworkSpec& spec, const std::string& path) {
  write_file_atomic(path, emit_spec(spec));
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qfnred
