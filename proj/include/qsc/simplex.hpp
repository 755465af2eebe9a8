#pragma once

#include <vector>

#include "qsc/rational.hpp"

/// Exact two-phase primal simplex over the rationals.
///
/// Dense tableau, Bland's smallest-index rule for both the entering column and
/// ratio-test ties, so the method cannot cycle. Sized for the small programs
/// in this library (tens of rows and columns); pivots skip zero entries.
namespace qsc::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  int variable;
  Rational coefficient;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation;
  Rational rhs;
};

/// maximize objective . x  subject to constraints, x >= 0.
/// An empty objective means "find any feasible point".
struct Program {
  int variables = 0;
  std::vector<Constraint> constraints;
  std::vector<Rational> objective;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<Rational> values;
  Rational objective;
};

Solution maximize(const Program& program);

}  // namespace qsc::lp
