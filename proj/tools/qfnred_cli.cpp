// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qfnred/qfnred.h"

namespace {

struct SpecDeleter {
  void operator()(qfnred_spec* s) const { qfnred_spec_free(s); }
};
struct ReportDeleter {
  void operator()(qfnred_report* r) const { qfnred_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { qfnred_string_free(s); }
};
using SpecPtr = std::unique_ptr<qfnred_spec, SpecDeleter>;
using ReportPtr = std::unique_ptr<qfnred_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct Args {
  std::string spec_path;
  double tol = 1e-9;
  std::string out_path;
  std::string report_path;
  std::vector<std::int64_t> internal;
  std::optional<double> k;
  std::vector<double> k_values;
  double t = 1.0;
  std::string rho0 = "basis:0";
  bool no_timestamp = false;
};

using Operation = qfnred_status (*)(const qfnred_spec*, const qfnred_options*, qfnred_report**);

int exit_code(qfnred_status s) {
  // Argument and internal errors share the IO/usage code.
  return s <= QFNRED_STRUCTURAL ? static_cast<int>(s) : 1;
}

int execute(const Args& a, Operation op, bool has_internal) {
  qfnred_spec* raw = nullptr;
  qfnred_status s = qfnred_spec_load(a.spec_path.c_str(), &raw);
  SpecPtr spec(raw);
  if (s != QFNRED_OK) {
    std::cerr << "qfnred: " << qfnred_last_error() << "\n";
    return exit_code(s);
  }

  qfnred_options opts;
  qfnred_options_init(&opts);
  opts.tol = a.tol;
  if (has_internal) {
    opts.internal = a.internal.data();
    opts.internal_count = a.internal.size();
  }
  if (a.k) {
    opts.has_k = 1;
    opts.k = *a.k;
  }
  if (!a.k_values.empty()) {
    opts.k_values = a.k_values.data();
    opts.k_count = a.k_values.size();
  }
  opts.t = a.t;
  opts.rho0 = a.rho0.c_str();

  qfnred_report* raw_report = nullptr;
  s = op(spec.get(), &opts, &raw_report);
  ReportPtr report(raw_report);
  const std::string failure = qfnred_last_error();
  if (!report) {
    std::cerr << "qfnred: " << failure << "\n";
    return exit_code(s);
  }
  const int timestamp = a.no_timestamp ? 0 : 1;

  char* raw_summary = nullptr;
  qfnred_report_summary(report.get(), &raw_summary);
  StringPtr summary(raw_summary);
  if (s != QFNRED_OK) std::cerr << "qfnred: " << failure << "\n";

  if (!a.report_path.empty()) {
    if (qfnred_report_save(report.get(), a.report_path.c_str(), timestamp) != QFNRED_OK) {
      std::cerr << "qfnred: " << qfnred_last_error() << "\n";
      return 1;
    }
    if (summary) std::cout << summary.get();
    std::cout << "report: " << a.report_path << "\n";
  } else {
    char* raw_json = nullptr;
    qfnred_report_json(report.get(), timestamp, &raw_json);
    StringPtr json(raw_json);
    if (json) std::cout << json.get();
  }

  if (!a.out_path.empty()) {
    qfnred_spec* raw_out = nullptr;
    qfnred_report_output(report.get(), &raw_out);
    SpecPtr reduced(raw_out);
    if (reduced) {
      if (qfnred_spec_save(reduced.get(), a.out_path.c_str()) != QFNRED_OK) {
        std::cerr << "qfnred: " << qfnred_last_error() << "\n";
        return 1;
      }
      if (!a.report_path.empty()) std::cout << "output: " << a.out_path << "\n";
    } else {
      std::cerr << "qfnred: no reduced network produced; " << a.out_path << " not written\n";
    }
  }
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model reduction of quantum feedback network generators"};
  app.set_version_flag("--version", std::string(qfnred_version()));
  app.require_subcommand(1);

  Args a;
  auto common = [&](CLI::App* sub) {
    sub->add_option("spec", a.spec_path, "Network spec (JSON)")->required();
    sub->add_option("--tol", a.tol, "Validator tolerance")
        ->envname("QFNRED_TOL")
        ->check(CLI::PositiveNumber);
    sub->add_option("--report", a.report_path, "Write the JSON report here instead of stdout");
    sub->add_flag("--no-timestamp", a.no_timestamp, "Omit timestamp and wall time from the report");
  };

  CLI::App* validate = app.add_subcommand("validate", "Check HP / structural conditions");
  common(validate);

  CLI::App* feedback = app.add_subcommand("feedback", "Eliminate internal channels");
  common(feedback);
  CLI::Option* internal_opt =
      feedback->add_option("--internal", a.internal, "Internal channels, 0-based (e.g. 1,2)")
          ->delimiter(',');
  feedback->add_option("--k", a.k, "Instantiate a scaled family at this k first")
      ->check(CLI::PositiveNumber);
  feedback->add_option("--out", a.out_path, "Write the reduced generator spec here");

  CLI::App* adiabatic = app.add_subcommand("adiabatic", "Eliminate fast degrees of freedom");
  common(adiabatic);
  CLI::Option* internal_adi =
      adiabatic->add_option("--internal", a.internal, "Internal channels, 0-based")->delimiter(',');
  adiabatic->add_option("--out", a.out_path, "Write the reduced generator spec here");

  CLI::App* commute = app.add_subcommand("commute", "Compare both reduction orders");
  common(commute);
  CLI::Option* internal_com =
      commute->add_option("--internal", a.internal, "Internal channels, 0-based")->delimiter(',');
  commute->add_option("--out", a.out_path, "Write the reduced generator spec here");

  CLI::App* converge = app.add_subcommand("converge", "Trace-distance convergence in k");
  common(converge);
  converge->add_option("--k", a.k_values, "Comma-separated k values (default 2,4,8,16,32)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  converge->add_option("--t", a.t, "Propagation time")->check(CLI::NonNegativeNumber);
  converge->add_option("--rho0", a.rho0, "basis:<i> or a JSON file with a \"rho\" matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (validate->parsed()) return execute(a, &qfnred_validate, false);
  if (feedback->parsed()) return execute(a, &qfnred_feedback, internal_opt->count() > 0);
  if (adiabatic->parsed()) return execute(a, &qfnred_adiabatic, internal_adi->count() > 0);
  if (commute->parsed()) return execute(a, &qfnred_commute, internal_com->count() > 0);
  return execute(a, &qfnred_converge, false);
}
