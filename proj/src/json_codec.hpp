// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

// JSON encoding shared by spec files and reports. Not installed.

#pragma once

#include <string>

#include "json.hpp"
#include "qfnred/generator.hpp"
#include "qfnred/spec_io.hpp"

namespace qfnred::detail {

using Json = nlohmann::ordered_json;

// Rows of [re, im] pairs.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, Index rows, Index cols, const std::string& where);

// Indented output that keeps each matrix row (a list of [re, im] pairs) on
// one line. Numbers use the shortest round-trip representation.
std::string dump_pretty(const Json& j);

// Full spec object including schema_version and kind.
Json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const Json& j);

}  // namespace qfnred::detail
