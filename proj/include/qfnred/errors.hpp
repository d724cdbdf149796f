// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace qfnred {

enum class ErrorCode {
  label_lookup,
  dimension,
  non_finite,
  singular_pivot,
  ill_defined_complement,
  ill_posed_network,
  structural,
  fast_decoupling,
  validation,
  parse,
  io,
  propagation_accuracy,
  invalid_argument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a pivot block fails the invertibility policy. `stage` names the
// complementation step (empty for single-stage complements).
class SingularPivotError : public Error {
 public:
  SingularPivotError(std::string pivot, std::string stage, double condition_number);

  const std::string& pivot() const noexcept { return pivot_; }
  const std::string& stage() const noexcept { return stage_; }
  double condition_number() const noexcept { return condition_number_; }

 private:
  std::string pivot_;
  std::string stage_;
  double condition_number_;
};

}  // namespace qfnred
