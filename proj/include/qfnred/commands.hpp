// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// End-to-end pipelines behind the command-line tool. Each one turns a parsed
// spec into a report (and possibly a reduced spec) and never throws for
// problems with the input itself.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qfnred/report.hpp"
#include "qfnred/spec_io.hpp"

namespace qfnred {

struct CommandOptions {
  double tol = kDefaultTol;
  // Overrides the roles stored in the spec: listed channels (0-based) become
  // internal, all others external.
  std::optional<std::vector<Index>> internal;
  // Instantiation point when feedback is applied to a scaled family.
  std::optional<double> k;
  std::vector<double> k_values{2.0, 4.0, 8.0, 16.0, 32.0};
  double t = 1.0;
  // "basis:i" for the i-th slow basis state, otherwise a path to a JSON file
  // {"rho": rows of [re, im] pairs} on the slow space.
  std::string rho0 = "basis:0";
};

struct CommandResult {
  ReductionReport report;
  std::optional<NetworkSpec> output;
};

CommandResult run_validate(const NetworkSpec& spec, const CommandOptions& opts = {});
CommandResult run_feedback(const NetworkSpec& spec, const CommandOptions& opts = {});
CommandResult run_adiabatic(const NetworkSpec& spec, const CommandOptions& opts = {});
CommandResult run_commute(const NetworkSpec& spec, const CommandOptions& opts = {});
CommandResult run_converge(const NetworkSpec& spec, const CommandOptions& opts = {});

// Fingerprint of a spec: kind, dimensions, roles and the hash of emit_spec.
InputFingerprint fingerprint(const NetworkSpec& spec);

// The spec with channel roles replaced as described for CommandOptions::internal.
// Throws Error(invalid_argument) for out-of-range or repeated indices.
NetworkSpec with_internal_channels(const NetworkSpec& spec, const std::vector<Index>& internal);

}  // namespace qfnred
