#pragma once

#include "envl0/operators.h"

#include <iosfwd>

namespace envl0::cli {

struct SuiteResult {
  int passed = 0;
  int total = 0;
  bool ok() const { return passed == total; }
};

/// Framelet tight-frame, DFT unitarity, KK* = I, K*K projector, and
/// normal_solve against a dense solve, for the given filter bank.
SuiteResult operator_suite(const FilterBank &filters, std::ostream &log);
/// prox_l0, soft_threshold and env_l0 against brute-force minimization.
SuiteResult prox_suite(std::ostream &log);

} // namespace envl0::cli
