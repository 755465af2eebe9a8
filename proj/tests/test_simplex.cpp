#include <doctest.h>

#include "qsc/simplex.hpp"

using namespace qsc;
using namespace qsc::lp;

TEST_CASE("simplex reaches a textbook optimum") {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18  -> (2, 6), 36
  Program p;
  p.variables = 2;
  p.objective = {Rational(3), Rational(5)};
  p.constraints.push_back({{{0, Rational(1)}}, Relation::LessEqual, Rational(4)});
  p.constraints.push_back({{{1, Rational(2)}}, Relation::LessEqual, Rational(12)});
  p.constraints.push_back({{{0, Rational(3)}, {1, Rational(2)}}, Relation::LessEqual, Rational(18)});
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == Rational(36));
  CHECK(s.values[0] == Rational(2));
  CHECK(s.values[1] == Rational(6));
}

TEST_CASE("Bland's rule terminates on Beale's cycling example") {
  // max 3/4 x1 - 20 x2 + 1/2 x3 - 6 x4, optimum 5/4 at x1 = 1, x3 = 1.
  Program p;
  p.variables = 4;
  p.objective = {Rational(3, 4), Rational(-20), Rational(1, 2), Rational(-6)};
  p.constraints.push_back({{{0, Rational(1, 4)}, {1, Rational(-8)}, {2, Rational(-1)}, {3, Rational(9)}},
                           Relation::LessEqual, Rational(0)});
  p.constraints.push_back({{{0, Rational(1, 2)}, {1, Rational(-12)}, {2, Rational(-1, 2)}, {3, Rational(3)}},
                           Relation::LessEqual, Rational(0)});
  p.constraints.push_back({{{2, Rational(1)}}, Relation::LessEqual, Rational(1)});
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.objective == Rational(5, 4));
}

TEST_CASE("infeasible and unbounded programs") {
  Program p;
  p.variables = 2;
  p.constraints.push_back({{{0, Rational(1)}, {1, Rational(1)}}, Relation::LessEqual, Rational(1)});
  p.constraints.push_back({{{0, Rational(1)}}, Relation::GreaterEqual, Rational(2)});
  CHECK(maximize(p).status == Status::Infeasible);

  Program u;
  u.variables = 2;
  u.objective = {Rational(1), Rational(0)};
  u.constraints.push_back({{{0, Rational(1)}, {1, Rational(-1)}}, Relation::LessEqual, Rational(1)});
  CHECK(maximize(u).status == Status::Unbounded);
}

TEST_CASE("redundant equalities and negative right-hand sides") {
  Program p;
  p.variables = 3;
  p.constraints.push_back({{{0, Rational(1)}, {1, Rational(1)}, {2, Rational(1)}}, Relation::Equal, Rational(1)});
  p.constraints.push_back({{{0, Rational(2)}, {1, Rational(2)}, {2, Rational(2)}}, Relation::Equal, Rational(2)});
  p.constraints.push_back({{{0, Rational(-1)}}, Relation::LessEqual, Rational(-1, 3)});
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.values[0] + s.values[1] + s.values[2] == Rational(1));
  CHECK(s.values[0] >= Rational(1, 3));
}

TEST_CASE("feasibility-only programs return a feasible point") {
  Program p;
  p.variables = 2;
  p.constraints.push_back({{{0, Rational(1)}, {1, Rational(1)}}, Relation::Equal, Rational(1)});
  p.constraints.push_back({{{1, Rational(1)}}, Relation::GreaterEqual, Rational(2, 3)});
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::Optimal);
  CHECK(s.values[1] >= Rational(2, 3));
  CHECK(s.values[0] + s.values[1] == Rational(1));
}
