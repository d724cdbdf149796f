// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"
#include "qfnred/dynamics.hpp"
#include "qfnred/reduce.hpp"

namespace qfnred {

namespace {

const char* kRateBandNote =
    "error ratios per doubling of k are compared with the band [1.5, 2.5]; this band is a "
    "test heuristic and does not affect the status";
const char* kProxyNote =
    "convergence is measured on the slow-subspace state; the system-field unitaries are not "
    "simulated";

std::vector<ChannelRole> roles_for(Index n, const std::vector<Index>& internal) {
  std::vector<ChannelRole> roles(static_cast<std::size_t>(n), ChannelRole::external);
  for (Index j : internal) {
    if (j < 0 || j >= n)
      throw Error(ErrorCode::invalid_argument,
                  "internal channel " + std::to_string(j) + " out of range 0.." +
                      std::to_string(n - 1));
    auto& r = roles[static_cast<std::size_t>(j)];
    if (r == ChannelRole::internal)
      throw Error(ErrorCode::invalid_argument,
                  "internal channel " + std::to_string(j) + " listed twice");
    r = ChannelRole::internal;
  }
  return roles;
}

ItoGeneratorMatrix require_generator(const NetworkSpec& spec, const CommandOptions& opts,
                                     ReductionReport& rep) {
  switch (spec.kind()) {
    case SpecKind::generator: return std::get<ItoGeneratorMatrix>(spec.value);
    case SpecKind::slh: return from_slh(std::get<SlhTriple>(spec.value), opts.tol);
    case SpecKind::scaled_family: {
      if (!opts.k)
        throw Error(ErrorCode::invalid_argument,
                    "a scaled family needs --k to be instantiated as a generator");
      std::ostringstream os;
      os << "family instantiated at k = " << *opts.k;
      rep.notes.push_back(os.str());
      return instantiate(std::get<ScaledGeneratorFamily>(spec.value), *opts.k, opts.tol);
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown spec kind");
}

const ScaledGeneratorFamily& require_family(const NetworkSpec& spec) {
  if (spec.kind() != SpecKind::scaled_family)
    throw Error(ErrorCode::invalid_argument,
                std::string("operation needs a scaled_family spec, got ") + to_string(spec.kind()));
  return std::get<ScaledGeneratorFamily>(spec.value);
}

ValidationFragment named(ValidationFragment f, std::string name) {
  f.name = std::move(name);
  return f;
}

// First failing fragment decides a validation failure.
void fail_on_validations(ReductionReport& rep, ReportStatus status) {
  if (rep.status != ReportStatus::pass) return;
  for (const auto& f : rep.validations) {
    if (!f.passed()) {
      rep.status = status;
      rep.error = f.name + " failed: " + f.failure_summary();
      return;
    }
  }
}

DensityMatrix parse_rho0(const std::string& text, Index slow_dim) {
  if (text.rfind("basis:", 0) == 0) {
    Index i = 0;
    try {
      std::size_t used = 0;
      i = static_cast<Index>(std::stoll(text.substr(6), &used));
      if (used != text.size() - 6) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw Error(ErrorCode::invalid_argument, "--rho0 expects basis:<index> or a file path");
    }
    return DensityMatrix::basis_state(slow_dim, i);
  }
  std::ifstream in(text, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + text);
  std::ostringstream ss;
  ss << in.rdbuf();
  detail::Json j;
  try {
    j = detail::Json::parse(ss.str());
  } catch (const detail::Json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed JSON in ") + text + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("rho")) throw Error(ErrorCode::parse, text + ": missing \"rho\"");
  return DensityMatrix::make(detail::matrix_from_json(j["rho"], slow_dim, slow_dim, "rho"));
}

template <class Body>
CommandResult run(const char* operation, const NetworkSpec& spec, const CommandOptions& opts,
                  Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult res;
  ReductionReport& rep = res.report;
  rep.operation = operation;
  rep.tol = opts.tol;
  rep.input = fingerprint(spec);
  try {
    NetworkSpec effective = opts.internal ? with_internal_channels(spec, *opts.internal) : spec;
    if (opts.internal) rep.input.roles = effective.roles();
    body(effective, res);
  } catch (const Error& e) {
    rep.error = e.what();
    rep.status = status_for(e);
    res.output.reset();
  }
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace

InputFingerprint fingerprint(const NetworkSpec& spec) {
  InputFingerprint fp;
  fp.kind = to_string(spec.kind());
  fp.initial_dim = spec.initial_dim();
  fp.channels = spec.channels();
  fp.slow_dim = spec.slow_dim();
  fp.roles = spec.roles();
  fp.hash = fnv1a_hex(emit_spec(spec));
  return fp;
}

NetworkSpec with_internal_channels(const NetworkSpec& spec, const std::vector<Index>& internal) {
  auto roles = roles_for(spec.channels(), internal);
  switch (spec.kind()) {
    case SpecKind::generator: {
      const auto& g = std::get<ItoGeneratorMatrix>(spec.value);
      return {ItoGeneratorMatrix::unchecked(g.K(), g.L(), g.M(), g.N(), std::move(roles))};
    }
    case SpecKind::slh: {
      SlhTriple t = std::get<SlhTriple>(spec.value);
      t.roles = std::move(roles);
      return {std::move(t)};
    }
    case SpecKind::scaled_family:
      return {std::get<ScaledGeneratorFamily>(spec.value).with_roles(std::move(roles))};
  }
  return spec;
}

CommandResult run_validate(const NetworkSpec& spec, const CommandOptions& opts) {
  return run("validate", spec, opts, [&](const NetworkSpec& s, CommandResult& res) {
    ReductionReport& rep = res.report;
    switch (s.kind()) {
      case SpecKind::generator:
        rep.validations.push_back(validate_hp(std::get<ItoGeneratorMatrix>(s.value), opts.tol));
        break;
      case SpecKind::slh:
        rep.validations.push_back(
            validate_hp(from_slh(std::get<SlhTriple>(s.value), opts.tol), opts.tol));
        break;
      case SpecKind::scaled_family: {
        const auto& fam = std::get<ScaledGeneratorFamily>(s.value);
        rep.validations.push_back(validate_family_hp(fam, opts.tol));
        rep.validations.push_back(validate_structure(fam, opts.tol));
        rep.validations.push_back(validate_fast_decoupling(fam, opts.tol));
        break;
      }
    }
    fail_on_validations(rep, ReportStatus::validation_failure);
  });
}

CommandResult run_feedback(const NetworkSpec& spec, const CommandOptions& opts) {
  return run("feedback", spec, opts, [&](const NetworkSpec& s, CommandResult& res) {
    ReductionReport& rep = res.report;
    const ItoGeneratorMatrix g = require_generator(s, opts, rep);
    rep.validations.push_back(named(validate_hp(g, opts.tol), "hp[input]"));
    fail_on_validations(rep, ReportStatus::validation_failure);
    if (rep.status != ReportStatus::pass) return;
    if (g.channels_with(ChannelRole::internal).empty())
      rep.notes.push_back("no internal channels; input returned unchanged");
    ItoGeneratorMatrix out = feedback_eliminate(g);
    rep.validations.push_back(named(validate_hp(out, opts.tol), "hp[output]"));
    fail_on_validations(rep, ReportStatus::validation_failure);
    res.output = NetworkSpec{out};
    rep.outputs.emplace_back("reduced", std::move(out));
  });
}

CommandResult run_adiabatic(const NetworkSpec& spec, const CommandOptions& opts) {
  return run("adiabatic", spec, opts, [&](const NetworkSpec& s, CommandResult& res) {
    ReductionReport& rep = res.report;
    const ScaledGeneratorFamily& fam = require_family(s);
    rep.validations.push_back(validate_family_hp(fam, opts.tol));
    fail_on_validations(rep, ReportStatus::validation_failure);
    rep.validations.push_back(validate_structure(fam, opts.tol));
    rep.validations.push_back(validate_fast_decoupling(fam, opts.tol));
    fail_on_validations(rep, ReportStatus::structural);
    if (rep.status != ReportStatus::pass) return;
    ItoGeneratorMatrix out = adiabatic_eliminate(fam, opts.tol);
    rep.validations.push_back(named(validate_hp(out, opts.tol), "hp[output]"));
    fail_on_validations(rep, ReportStatus::validation_failure);
    res.output = NetworkSpec{out};
    rep.outputs.emplace_back("reduced", std::move(out));
  });
}

CommandResult run_commute(const NetworkSpec& spec, const CommandOptions& opts) {
  return run("commute", spec, opts, [&](const NetworkSpec& s, CommandResult& res) {
    const ScaledGeneratorFamily& fam = require_family(s);
    ReductionReport inner = check_commutativity(fam, opts.tol);
    inner.input = res.report.input;
    res.report = std::move(inner);
    if (res.report.status == ReportStatus::pass)
      if (const auto* fa = res.report.output("FA")) res.output = NetworkSpec{*fa};
  });
}

CommandResult run_converge(const NetworkSpec& spec, const CommandOptions& opts) {
  return run("converge", spec, opts, [&](const NetworkSpec& s, CommandResult& res) {
    ReductionReport& rep = res.report;
    const ScaledGeneratorFamily& fam = require_family(s);
    if (opts.k_values.empty()) throw Error(ErrorCode::invalid_argument, "no k values given");
    for (double k : opts.k_values)
      if (!(k > 0.0)) throw Error(ErrorCode::invalid_argument, "k values must be positive");
    const DensityMatrix rho0 = parse_rho0(opts.rho0, fam.decomposition().slow_dim());
    rep.validations.push_back(validate_structure(fam, opts.tol));
    rep.validations.push_back(validate_fast_decoupling(fam, opts.tol));
    fail_on_validations(rep, ReportStatus::structural);
    if (rep.status != ReportStatus::pass) return;

    ConvergenceTable table = convergence_study(fam, rho0, opts.t, opts.k_values, opts.tol);
    rep.notes.push_back(kProxyNote);
    if (!table.monotone) {
      rep.notes.push_back("fewer than two k values; monotonicity check skipped");
    } else {
      rep.notes.push_back(kRateBandNote);
      const bool in_band = std::all_of(table.ratios.begin(), table.ratios.end(),
                                       [](double r) { return r >= 1.5 && r <= 2.5; });
      rep.notes.push_back(std::string("error ratios within band: ") + (in_band ? "yes" : "no"));
      if (!*table.monotone) {
        rep.status = ReportStatus::validation_failure;
        rep.error = "errors do not decrease monotonically in k";
      }
    }
    rep.convergence = std::move(table);
  });
}

}  // namespace qfnred
