// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "qfnred/commands.hpp"
#include "qfnred/fixtures.hpp"

using namespace qfnred;
using Json = nlohmann::ordered_json;

namespace {

Json rendered(const ReductionReport& rep, bool timestamp = false) {
  return Json::parse(render_report(rep, {timestamp}));
}

}  // namespace

TEST_SUITE("commands") {

TEST_CASE("report JSON layout") {
  const auto res = run_validate({fixtures::swap_scattering()});
  const Json j = rendered(res.report);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"tool", "version", "operation", "status", "exit_code",
                                         "tolerance", "input", "validations", "residuals",
                                         "outputs", "notes", "error"});
  CHECK(j["operation"] == "validate");
  CHECK(j["status"] == "pass");
  CHECK(j["exit_code"] == 0);
  CHECK(j["input"]["d"] == 1);
  CHECK(j["input"]["channel_roles"] == Json::array({"external", "internal"}));
  CHECK(j["input"]["hash"].get<std::string>().size() == 16);
}

TEST_CASE("timestamps are optional") {
  const auto res = run_validate({fixtures::trivial_generator()});
  const Json with = rendered(res.report, true);
  CHECK(with.contains("timestamp"));
  CHECK(with.contains("wall_time_seconds"));
  const Json without = rendered(res.report, false);
  CHECK_FALSE(without.contains("timestamp"));
  // deterministic without timestamps
  CHECK(render_report(res.report, {false}) ==
        render_report(run_validate({fixtures::trivial_generator()}).report, {false}));
}

TEST_CASE("residuals are rounded to six significant digits") {
  ReductionReport rep;
  rep.operation = "x";
  rep.add_residual("r", 1.234567891);
  rep.add_residual("inf", std::numeric_limits<double>::infinity());
  const Json j = rendered(rep);
  CHECK(j["residuals"]["r"].get<double>() == 1.23457);
  CHECK(j["residuals"]["inf"].is_null());
}

TEST_CASE("validate exit statuses") {
  CHECK(run_validate({fixtures::amplitude_damping()}).report.status == ReportStatus::pass);
  const auto flipped = run_validate({fixtures::flipped_m()});
  CHECK(flipped.report.status == ReportStatus::validation_failure);
  const Json j = rendered(flipped.report);
  bool found = false;
  for (const auto& c : j["validations"][0]["checks"])
    if (c["name"] == "||M + NL*||") {
      found = true;
      CHECK(c["residual"].get<double>() == doctest::Approx(2.0));
      CHECK_FALSE(c["passed"].get<bool>());
    }
  CHECK(found);
  CHECK(run_validate({fixtures::fast_violating()}).report.status ==
        ReportStatus::validation_failure);
  CHECK(run_validate({fixtures::fast_cavity_loop()}).report.status == ReportStatus::pass);
}

TEST_CASE("feedback command") {
  const auto ok = run_feedback({fixtures::swap_scattering()});
  CHECK(ok.report.status == ReportStatus::pass);
  REQUIRE(ok.output.has_value());
  CHECK(ok.output->channels() == 1);
  CHECK(run_feedback({fixtures::ill_posed_loop()}).report.status ==
        ReportStatus::ill_posed_feedback);
  // a family needs k
  CommandOptions opts;
  const auto no_k = run_feedback({fixtures::fast_cavity_loop()}, opts);
  CHECK(no_k.report.status == ReportStatus::io_error);
  opts.k = 3.0;
  const auto with_k = run_feedback({fixtures::fast_cavity_loop()}, opts);
  CHECK(with_k.report.status == ReportStatus::pass);
}

TEST_CASE("internal channel override") {
  CommandOptions opts;
  opts.internal = std::vector<Index>{};
  // no internal channels: the swap passes through untouched
  const auto none = run_feedback({fixtures::swap_scattering()}, opts);
  CHECK(none.report.status == ReportStatus::pass);
  CHECK(none.output->channels() == 2);
  opts.internal = std::vector<Index>{0};
  CHECK(run_feedback({fixtures::swap_scattering()}, opts).output->channels() == 1);
  opts.internal = std::vector<Index>{5};
  CHECK(run_feedback({fixtures::swap_scattering()}, opts).report.status == ReportStatus::io_error);
  opts.internal = std::vector<Index>{1, 1};
  CHECK(run_feedback({fixtures::swap_scattering()}, opts).report.status == ReportStatus::io_error);
}

TEST_CASE("adiabatic command") {
  const auto ok = run_adiabatic({fixtures::fast_cavity()});
  CHECK(ok.report.status == ReportStatus::pass);
  REQUIRE(ok.output.has_value());
  CHECK(ok.output->initial_dim() == 2);
  const auto bad = run_adiabatic({fixtures::fast_violating()});
  CHECK(bad.report.status == ReportStatus::structural);
  CHECK_FALSE(bad.output.has_value());
  CHECK(run_adiabatic({fixtures::swap_scattering()}).report.status == ReportStatus::io_error);
}

TEST_CASE("commute command") {
  const auto ok = run_commute({fixtures::fast_cavity_loop()});
  CHECK(ok.report.status == ReportStatus::pass);
  CHECK(ok.output.has_value());
  CHECK(*ok.report.residual("max_deviation") < 1e-9);
  const auto bad = run_commute({fixtures::feedback_kernel_violating()});
  CHECK(bad.report.status == ReportStatus::structural);
  CHECK_FALSE(bad.output.has_value());
}

TEST_CASE("converge command") {
  CommandOptions opts;
  opts.rho0 = "basis:1";
  const auto ok = run_converge({fixtures::fast_cavity()}, opts);
  CHECK(ok.report.status == ReportStatus::pass);
  REQUIRE(ok.report.convergence.has_value());
  CHECK(ok.report.convergence->rows.size() == 5);
  opts.k_values = {4.0};
  const auto single = run_converge({fixtures::fast_cavity()}, opts);
  CHECK(single.report.status == ReportStatus::pass);
  bool skipped = false;
  for (const auto& n : single.report.notes) skipped = skipped || n.find("skipped") != std::string::npos;
  CHECK(skipped);
  opts.rho0 = "basis:x";
  CHECK(run_converge({fixtures::fast_cavity()}, opts).report.status == ReportStatus::io_error);
}

TEST_CASE("converge reads a state file") {
  const auto path = std::filesystem::temp_directory_path() / "qfnred_rho0.json";
  {
    std::ofstream out(path);
    out << R"({"rho": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]})";
  }
  CommandOptions opts;
  opts.rho0 = path.string();
  opts.k_values = {2.0, 4.0};
  const auto res = run_converge({fixtures::fast_cavity()}, opts);
  CHECK(res.report.status == ReportStatus::pass);
  std::filesystem::remove(path);
}

TEST_CASE("summary text") {
  const auto rep = run_validate({fixtures::flipped_m()}).report;
  const std::string s = summarize_report(rep);
  CHECK(s.find("validation_failure") != std::string::npos);
  CHECK(s.find("||M + NL*||") != std::string::npos);
}

}  // TEST_SUITE
