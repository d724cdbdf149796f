// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// Writes the canonical fixture specs into a directory.

#include <filesystem>
#include <iostream>

#include "qfnred/fixtures.hpp"
#include "qfnred/spec_io.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: " << argv[0] << " <output-dir>\n";
    return 1;
  }
  const std::filesystem::path dir(argv[1]);
  try {
    std::filesystem::create_directories(dir);
    for (const auto& f : qfnred::fixtures::all_fixtures())
      qfnred::save_spec(f.spec, (dir / f.file).string());
    qfnred::write_file_atomic((dir / qfnred::fixtures::kMalformedFixtureFile).string(),
                              qfnred::fixtures::kMalformedFixtureText);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
