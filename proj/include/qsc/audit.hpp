#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

/// Outcome of an exhaustive or sampled search: the first counterexample in
/// scan order, plus how many cases were looked at.
template <class Case>
struct AuditResult {
  std::optional<Case> counterexample;
  std::uint64_t cases_examined = 0;

  bool passed() const { return !counterexample.has_value(); }
};

/// Quantiles exercised by the audits: k/12 for k = 0..12. The grid already
/// contains the regime boundaries 1/3, 1/2 and 2/3 exactly.
std::vector<Rational> audit_h_grid();

}  // namespace qsc
