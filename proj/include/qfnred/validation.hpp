// Copyright the qfnred authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace qfnred {

// Default relative Frobenius tolerance for every validator.
inline constexpr double kDefaultTol = 1e-9;

struct ValidationCheck {
  std::string name;
  double residual = 0.0;   // absolute value of the checked quantity
  double threshold = 0.0;  // pass iff residual <= threshold (strict < for conditioning)
  bool passed = false;
};

struct ValidationFragment {
  std::string name;
  std::vector<ValidationCheck> checks;

  bool passed() const;
  const ValidationCheck* find(const std::string& check_name) const;

  // residual <= tol * max(1, scale)
  void add_residual(std::string check_name, double residual, double scale, double tol);
  // condition < limit
  void add_condition(std::string check_name, double condition, double limit);
  // A failed check that could not be evaluated.
  void add_failure(std::string check_name);

  // "name: residual > threshold; ..." for every failed check.
  std::string failure_summary() const;
};

}  // namespace qfnred
