// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "qfnred/generator.hpp"

namespace qfnred {

inline constexpr const char* kSchemaVersion = "qfnred/1";

enum class SpecKind { generator, slh, scaled_family };

const char* to_string(SpecKind kind);

// A parsed network description. Parsing checks shapes and finiteness only, so
// a spec may hold data that fails the physical validators.
struct NetworkSpec {
  std::variant<ItoGeneratorMatrix, SlhTriple, ScaledGeneratorFamily> value;

  SpecKind kind() const;
  Index initial_dim() const;
  Index channels() const;
  Index slow_dim() const;  // 0 unless kind() is scaled_family
  std::vector<ChannelRole> roles() const;
};

// Throws Error(parse) with a path to the offending field.
NetworkSpec parse_spec(std::string_view text);
// Throws Error(io) if the file cannot be read, Error(parse) as above.
NetworkSpec load_spec(const std::string& path);

// Canonical text: fixed field order, shortest round-trip number formatting,
// trailing newline. parse_spec(emit_spec(x)) reproduces x bit for bit.
std::string emit_spec(const NetworkSpec& spec);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& contents);
void save_spec(const NetworkSpec& spec, const std::string& path);

// FNV-1a 64-bit digest as 16 lower-case hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace qfnred
