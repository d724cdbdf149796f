// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include "qfnred/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "json_codec.hpp"

namespace qfnred {

namespace {

using detail::Json;

// Six significant digits; non-finite values become null.
Json rounded(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return std::strtod(buf, nullptr);
}

Json fragment_to_json(const ValidationFragment& f) {
  Json j;
  j["name"] = f.name;
  j["passed"] = f.passed();
  Json checks = Json::array();
  for (const auto& c : f.checks) {
    Json cj;
    cj["name"] = c.name;
    cj["residual"] = rounded(c.residual);
    cj["threshold"] = rounded(c.threshold);
    cj["passed"] = c.passed;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const char* to_string(ReportStatus status) {
  switch (status) {
    case ReportStatus::pass: return "pass";
    case ReportStatus::io_error: return "io_error";
    case ReportStatus::validation_failure: return "validation_failure";
    case ReportStatus::ill_posed_feedback: return "ill_posed_feedback";
    case ReportStatus::structural: return "structural";
  }
  return "unknown";
}

ReportStatus status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse:
    case ErrorCode::io:
    case ErrorCode::invalid_argument: return ReportStatus::io_error;
    case ErrorCode::ill_posed_network: return ReportStatus::ill_posed_feedback;
    case ErrorCode::structural:
    case ErrorCode::fast_decoupling: return ReportStatus::structural;
    default: return ReportStatus::validation_failure;
  }
}

ReportStatus status_for(const Error& e) {
  if (const auto* sp = dynamic_cast<const SingularPivotError*>(&e))
    return sp->stage() == "feedback" ? ReportStatus::ill_posed_feedback : ReportStatus::structural;
  return status_for(e.code());
}

const double* ReductionReport::residual(const std::string& name) const {
  for (const auto& [k, v] : residuals)
    if (k == name) return &v;
  return nullptr;
}

const ItoGeneratorMatrix* ReductionReport::output(const std::string& name) const {
  for (const auto& [k, g] : outputs)
    if (k == name) return &g;
  return nullptr;
}

bool ReductionReport::all_validations_passed() const {
  return std::all_of(validations.begin(), validations.end(),
                     [](const ValidationFragment& f) { return f.passed(); });
}

std::string render_report(const ReductionReport& r, const ReportFormat& format) {
  Json j;
  j["tool"] = "qfnred";
  j["version"] = QFNRED_VERSION_STRING;
  j["operation"] = r.operation;
  j["status"] = to_string(r.status);
  j["exit_code"] = static_cast<int>(r.status);
  j["tolerance"] = r.tol;

  Json input;
  input["kind"] = r.input.kind;
  input["d"] = r.input.initial_dim;
  input["n"] = r.input.channels;
  input["slow_dim"] = r.input.slow_dim;
  Json roles = Json::array();
  for (ChannelRole role : r.input.roles) roles.push_back(to_string(role));
  input["channel_roles"] = std::move(roles);
  input["hash"] = r.input.hash;
  j["input"] = std::move(input);

  Json vals = Json::array();
  for (const auto& f : r.validations) vals.push_back(fragment_to_json(f));
  j["validations"] = std::move(vals);

  Json res = Json::object();
  for (const auto& [k, v] : r.residuals) res[k] = rounded(v);
  j["residuals"] = std::move(res);

  if (r.convergence) {
    const ConvergenceTable& c = *r.convergence;
    Json cj;
    cj["t"] = c.t;
    Json rows = Json::array();
    for (const auto& row : c.rows) {
      Json rj;
      rj["k"] = row.k;
      rj["error"] = rounded(row.error);
      rows.push_back(std::move(rj));
    }
    cj["rows"] = std::move(rows);
    Json ratios = Json::array();
    for (double x : c.ratios) ratios.push_back(rounded(x));
    cj["ratios"] = std::move(ratios);
    cj["monotone"] = c.monotone ? Json(*c.monotone) : Json(nullptr);
    j["convergence"] = std::move(cj);
  }

  Json outs = Json::object();
  for (const auto& [k, g] : r.outputs) outs[k] = detail::spec_to_json(NetworkSpec{g});
  j["outputs"] = std::move(outs);

  Json notes = Json::array();
  for (const auto& n : r.notes) notes.push_back(n);
  j["notes"] = std::move(notes);
  j["error"] = r.error ? Json(*r.error) : Json(nullptr);

  if (format.timestamp) {
    j["timestamp"] = utc_now();
    j["wall_time_seconds"] = r.wall_time_seconds;
  }
  return detail::dump_pretty(j);
}

std::string summarize_report(const ReductionReport& r) {
  std::ostringstream os;
  os << r.operation << ": " << to_string(r.status) << "\n";
  for (const auto& f : r.validations)
    if (!f.passed()) os << "  failed " << f.name << ": " << f.failure_summary() << "\n";
  for (const auto& [k, v] : r.residuals) os << "  " << k << " = " << v << "\n";
  if (r.convergence) {
    os << "  k          error\n";
    for (const auto& row : r.convergence->rows) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "  %-10g %.6e\n", row.k, row.error);
      os << buf;
    }
  }
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  if (r.error) os << "  error: " << *r.error << "\n";
  return os.str();
}

}  // namespace qfnred
