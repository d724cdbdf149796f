// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qfnred/generator.hpp"
#include "qfnred/validation.hpp"

namespace qfnred {

// Numeric values double as process exit codes.
enum class ReportStatus : int {
  pass = 0,
  io_error = 1,
  validation_failure = 2,
  ill_posed_feedback = 3,
  structural = 4,
};

const char* to_string(ReportStatus status);

// Status implied by an error raised inside a reduction.
ReportStatus status_for(ErrorCode code);
// As above, except that a singular pivot maps by stage: feedback pivots are
// ill-posed loops, all others structural.
ReportStatus status_for(const Error& e);

struct InputFingerprint {
  std::string kind;
  Index initial_dim = 0;
  Index channels = 0;
  Index slow_dim = 0;
  std::vector<ChannelRole> roles;
  std::string hash;  // FNV-1a 64 of the canonical spec text, hex
};

struct ConvergenceRow {
  double k = 0.0;
  double error = 0.0;
};

struct ConvergenceTable {
  double t = 0.0;
  std::vector<ConvergenceRow> rows;
  std::vector<double> ratios;  // error(k_i) / error(k_{i+1})
  std::optional<bool> monotone;  // unset when fewer than two k values
};

struct ReductionReport {
  std::string operation;
  InputFingerprint input;
  double tol = kDefaultTol;
  ReportStatus status = ReportStatus::pass;
  std::vector<ValidationFragment> validations;
  std::vector<std::pair<std::string, double>> residuals;
  std::vector<std::pair<std::string, ItoGeneratorMatrix>> outputs;
  std::optional<ConvergenceTable> convergence;
  std::vector<std::string> notes;
  std::optional<std::string> error;
  double wall_time_seconds = 0.0;

  void add_residual(std::string name, double value) {
    residuals.emplace_back(std::move(name), value);
  }
  const double* residual(const std::string& name) const;
  const ItoGeneratorMatrix* output(const std::string& name) const;
  bool all_validations_passed() const;
};

struct ReportFormat {
  bool timestamp = true;  // adds "timestamp" and "wall_time_seconds"
};

// Deterministic JSON text: fixed key order, residuals rounded to six
// significant digits, one matrix row per line.
std::string render_report(const ReductionReport& report, const ReportFormat& format = {});

// A few human-readable lines: status, failed checks, residuals.
std::string summarize_report(const ReductionReport& report);

}  // namespace qfnred
