// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "qfnred/dynamics.hpp"
#include "qfnred/fixtures.hpp"
#include "qfnred/reduce.hpp"
#include "qfnred/spec_io.hpp"
#include "support/oracles.hpp"
#include "support/random_family.hpp"

using namespace qfnred;
using namespace qfnred::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared random suite for the family criteria.
std::vector<ScaledGeneratorFamily> random_suite(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ScaledGeneratorFamily> out;
  while (out.size() < count) out.push_back(random_family(rng));
  return out;
}

Outcome commutativity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto suite = random_suite(120, 1001);
  double worst = 0.0;
  std::size_t failures = 0;
  for (const auto& fam : suite) {
    try {
      const auto fa = compose_fa(fam).nested.matrix();
      const auto af = compose_af(fam).nested.matrix();
      const auto joint = joint_elimination(fam).matrix();
      worst = std::max({worst, relative_difference(fa, af), relative_difference(fa, joint),
                        relative_difference(af, joint)});
    } catch (const Error&) {
      ++failures;
    }
  }
  const double t = seconds_since(t0);
  return {failures == 0 && worst < 1e-9 && t < 10.0,
          std::to_string(suite.size()) + " families, max deviation " + fmt(worst) +
              ", undefined " + std::to_string(failures) + ", " + fmt(t) + " s"};
}

Outcome hp_preservation() {
  const auto suite = random_suite(60, 2002);
  Rng rng(2003);
  std::size_t checked = 0, failed = 0;
  auto check = [&](const ItoGeneratorMatrix& g) {
    ++checked;
    if (!validate_hp(g, 1e-9).passed()) ++failed;
  };
  try {
    for (const auto& fam : suite) {
      check(feedback_eliminate(instantiate(fam, rng.uniform(0.5, 8.0))));
      check(adiabatic_eliminate(fam));
      const auto fa = compose_fa(fam);
      check(fa.nested);
      check(fa.operational);
      const auto af = compose_af(fam);
      check(af.nested);
      check(af.operational);
    }
  } catch (const Error& e) {
    return {false, std::string("reduction threw: ") + e.what()};
  }
  return {failed == 0, std::to_string(checked) + " outputs, " + std::to_string(failed) + " not HP"};
}

Outcome successive_complements() {
  Rng rng(3003);
  double worst = 0.0;
  int tested = 0, rejected = 0;
  while (tested < 1000) {
    const Index n = rng.integer(3, 12);
    const Index a = rng.integer(1, static_cast<int>(n) - 2);
    const Index b = rng.integer(1, static_cast<int>(n - a) - 1);
    const ComplexMatrix x = random_complex(n, n, rng);
    const auto p = BlockPartition::contiguous({{"a", a}, {"b", b}, {"c", n - a - b}});
    // every pivot met on either route must be well conditioned
    const double screen = std::max(
        {dense_condition(x.topLeftCorner(a + b, a + b)), dense_condition(x.topLeftCorner(a, a)),
         dense_condition(x.block(a, a, b, b))});
    if (screen > 1e6) {
      ++rejected;
      continue;
    }
    const BlockOperatorMatrix m(x, p);
    const ComplexMatrix one = schur_complement(m, {"a", "b"}).matrix();
    const ComplexMatrix ab = successive_schur(m, {"a"}, {"b"}).matrix();
    const ComplexMatrix ba = successive_schur(m, {"b"}, {"a"}).matrix();
    worst = std::max({worst, relative_difference(one, ab), relative_difference(one, ba),
                      relative_difference(ab, ba)});
    ++tested;
  }
  return {worst < 1e-8, std::to_string(tested) + " matrices (" + std::to_string(rejected) +
                            " screened out), max deviation " + fmt(worst)};
}

Outcome generalized_inverse_criterion() {
  Rng rng(4004);
  double worst_ok = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = rng.integer(2, 6), c = rng.integer(1, 4);
    const Index r = rng.integer(1, static_cast<int>(p) - 1);
    const ComplexMatrix g22 = random_complex(p, r, rng) * random_complex(r, p, rng);
    ComplexMatrix x(c + p, c + p);
    x.topLeftCorner(c, c) = random_complex(c, c, rng);
    x.topRightCorner(c, p) = random_complex(c, p, rng) * g22;
    x.bottomLeftCorner(p, c) = g22 * random_complex(p, c, rng);
    x.bottomRightCorner(p, p) = g22;
    const BlockOperatorMatrix m(x, BlockPartition::contiguous({{"c", c}, {"p", p}}));
    const ComplexMatrix mp = generalized_inverse(g22);
    const ComplexMatrix id = ComplexMatrix::Identity(p, p);
    const ComplexMatrix other = mp + (id - mp * g22) * random_complex(p, p, rng) +
                                random_complex(p, p, rng) * (id - g22 * mp);
    try {
      const auto a = generalized_schur_complement(m, {"p"});
      const auto b = schur_complement_with_inverse(m, {"p"}, other);
      worst_ok = std::max(worst_ok, relative_difference(a.matrix(), b.matrix()));
    } catch (const Error& e) {
      return {false, std::string("valid instance refused: ") + e.what()};
    }
  }
  int separated = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index p = rng.integer(2, 6), c = rng.integer(1, 4);
    const Index r = rng.integer(1, static_cast<int>(p) - 1);
    const ComplexMatrix g22 = random_complex(p, r, rng) * random_complex(r, p, rng);
    ComplexMatrix x = random_complex(c + p, c + p, rng);
    x.bottomRightCorner(p, p) = g22;
    // break exactly one inclusion, alternating which
    if (trial % 2 == 0)
      x.topRightCorner(c, p) = random_complex(c, p, rng) * g22;
    else
      x.bottomLeftCorner(p, c) = g22 * random_complex(p, c, rng);
    const BlockOperatorMatrix m(x, BlockPartition::contiguous({{"c", c}, {"p", p}}));
    const ComplexMatrix mp = generalized_inverse(g22);
    const ComplexMatrix id = ComplexMatrix::Identity(p, p);
    const ComplexMatrix other = mp + (id - mp * g22) * random_complex(p, p, rng) +
                                random_complex(p, p, rng) * (id - g22 * mp);
    bool refused = false;
    try {
      generalized_schur_complement(m, {"p"});
    } catch (const Error& e) {
      refused = e.code() == ErrorCode::ill_defined_complement;
    }
    const double diff =
        relative_difference(schur_complement_with_inverse(m, {"p"}, mp).matrix(),
                            schur_complement_with_inverse(m, {"p"}, other).matrix());
    if (refused || diff > 1e-3) ++separated;
  }
  return {worst_ok < 1e-9 && separated == 50,
          "200 valid: max deviation " + fmt(worst_ok) + "; 50 violating: " +
              std::to_string(separated) + " refused or differing"};
}

Outcome path_equivalence() {
  const auto suite = random_suite(120, 1001);
  double worst = 0.0;
  try {
    for (const auto& fam : suite)
      worst = std::max({worst, compose_fa(fam).discrepancy, compose_af(fam).discrepancy});
  } catch (const Error& e) {
    return {false, std::string("composition threw: ") + e.what()};
  }
  return {worst < 1e-10, std::to_string(suite.size()) + " families, max path discrepancy " + fmt(worst)};
}

Outcome fast_cavity_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = convergence_study(fixtures::fast_cavity(), DensityMatrix::basis_state(2, 1), 1.0,
                                       {2, 4, 8, 16, 32});
  const double t = seconds_since(t0);
  bool strictly = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    strictly = strictly && table.rows[i].error < table.rows[i - 1].error;
  const double last = table.rows.back().error;
  bool in_band = true;
  std::string ratios;
  for (double r : table.ratios) {
    in_band = in_band && r >= 1.5 && r <= 2.5;
    ratios += (ratios.empty() ? "" : ",") + fmt(r);
  }
  return {strictly && last < 0.02 && t < 30.0,
          "errors strictly decreasing: " + std::string(strictly ? "yes" : "no") + ", error(k=32) " +
              fmt(last) + ", " + fmt(t) + " s; ratios " + ratios + " (band [1.5, 2.5] " +
              (in_band ? "met" : "not met") + ", informational)"};
}

Outcome amplitude_damping() {
  const auto s = lindblad_generator(from_slh(fixtures::amplitude_damping(1.0)));
  const auto rho = propagate(s, DensityMatrix::basis_state(2, 1), 1.0);
  const double pop = rho.matrix()(1, 1).real();
  const double err = std::abs(pop - std::exp(-1.0));
  return {err < 1e-9, "excited population " + fmt(pop) + ", |error| " + fmt(err)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Outcome cli_round_trip_and_golden() {
  // parse/emit round trip
  std::size_t round_trips = 0;
  for (const auto& f : fixtures::all_fixtures()) {
    const std::string text = read_file(fs::path(QFNRED_FIXTURE_DIR) / f.file);
    if (emit_spec(parse_spec(text)) != text) return {false, "round trip changed " + f.file};
    ++round_trips;
  }
  Rng rng(5005);
  for (int i = 0; i < 50; ++i) {
    const NetworkSpec spec{random_family(rng)};
    const std::string text = emit_spec(spec);
    if (emit_spec(parse_spec(text)) != text ||
        !(std::get<ScaledGeneratorFamily>(parse_spec(text).value) ==
          std::get<ScaledGeneratorFamily>(spec.value)))
      return {false, "random family round trip is not exact"};
    ++round_trips;
  }

  // golden reports
  const fs::path work = fs::path(QFNRED_TEST_TMP_DIR) / "acceptance_golden";
  fs::create_directories(work);
  std::ifstream cases(fs::path(QFNRED_GOLDEN_DIR) / "cases.txt");
  std::string line;
  std::size_t compared = 0;
  while (std::getline(cases, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name, sub, spec, tok;
    int expect = 0;
    ls >> name >> expect >> sub >> spec;
    const fs::path report = work / (name + ".json");
    const fs::path out = work / (name + ".out.json");
    fs::remove(report);
    fs::remove(out);
    std::string cmd = quote(QFNRED_CLI_PATH) + " " + sub + " " +
                      quote((fs::path(QFNRED_FIXTURE_DIR) / spec).string());
    while (ls >> tok) cmd += " " + (tok == "@OUT@" ? quote(out.string()) : quote(tok));
    cmd += " --no-timestamp --report " + quote(report.string()) + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (rc != expect)
      return {false, name + ": exit " + std::to_string(rc) + ", expected " + std::to_string(expect)};
    for (const auto& [produced, golden] :
         {std::pair{report, fs::path(QFNRED_GOLDEN_DIR) / (name + ".json")},
          std::pair{out, fs::path(QFNRED_GOLDEN_DIR) / (name + ".out.json")}}) {
      if (fs::exists(golden) != fs::exists(produced)) return {false, name + ": output files differ"};
      if (!fs::exists(golden)) continue;
      if (read_file(produced) != read_file(golden)) return {false, name + ": " + golden.filename().string() + " differs"};
      ++compared;
    }
  }
  return {compared > 0, std::to_string(round_trips) + " exact round trips, " +
                            std::to_string(compared) + " golden files byte-identical"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"commutativity of FA, AF and joint elimination", commutativity},
      {"HP preservation of reduction outputs", hp_preservation},
      {"successive vs one-shot Schur complements", successive_complements},
      {"generalized-inverse independence and refusal", generalized_inverse_criterion},
      {"nested vs operational path equivalence", path_equivalence},
      {"fast-cavity convergence in k", fast_cavity_convergence},
      {"amplitude damping population", amplitude_damping},
      {"CLI round trip and golden reports", cli_round_trip_and_golden},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::printf("%s  C%zu %s: %s [%.2f s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str(), seconds_since(t0));
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
