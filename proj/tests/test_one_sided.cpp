#include <doctest.h>

#include <stdexcept>

#include "one_sided_oracles.hpp"
#include "qsc/one_sided.hpp"
#include "qsc/quantile.hpp"
#include "support/random_instances.hpp"

using namespace qsc;
using namespace qsc::testing;

namespace {

// a = 0, b = 1, c = 2.
OneSidedInstance psd_counterexample() {
  return OneSidedInstance({pref_of({0, 1, 2}), pref_of({1, 2, 0}), pref_of({1, 2, 0})},
                          {Quantile(Rational(0)), Quantile(Rational(1, 3)), Quantile(Rational(1, 3))});
}

// Largest set of agents that can all have their top item as representative,
// by LP over every subset.
int max_top_choice_by_subsets(const OneSidedInstance& inst) {
  const int n = inst.size();
  int best = 0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> r(static_cast<std::size_t>(n), n);
    int size = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        r[static_cast<std::size_t>(i)] = 1;
        ++size;
      }
    }
    if (size > best && ranks_feasible(inst, r)) best = size;
  }
  return best;
}

OneSidedInstance random_instance(Rng& rng, int n) { return OneSidedInstance(rng.profile(n, n), rng.quantiles(n)); }

RationalMatrix matrix_of(std::initializer_list<std::initializer_list<Rational>> rows) {
  RationalMatrix x(static_cast<int>(rows.size()));
  int i = 0;
  for (const auto& row : rows) {
    int j = 0;
    for (const auto& v : row) x.at(i, j++) = v;
    ++i;
  }
  return x;
}

}  // namespace

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(OneSidedInstance({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(OneSidedInstance({pref_of({0, 1, 2})}, {Quantile()}), std::invalid_argument);
  CHECK_THROWS_AS(OneSidedInstance({pref_of({0, 1}), pref_of({1, 0})}, {Quantile()}), std::invalid_argument);
}

TEST_CASE("complete_lottery") {
  CHECK(complete_lottery(RationalMatrix(3)) == MatchingLottery::from_permutation(std::vector<int>{0, 1, 2}));
  const auto u = MatchingLottery::uniform(3);
  CHECK(complete_lottery(u.matrix()) == u);
  RationalMatrix corner(3);
  corner.at(0, 0) = 1;
  const auto filled = complete_lottery(corner);
  CHECK(filled.at(0, 0) == Rational(1));
  for (int k = 1; k < 3; ++k) {
    CHECK(filled.at(0, k).is_zero());
    CHECK(filled.at(k, 0).is_zero());
  }
  RationalMatrix over(2);
  over.at(0, 0) = Rational(2, 3);
  over.at(1, 0) = Rational(2, 3);
  CHECK_THROWS_AS(complete_lottery(over), std::invalid_argument);

  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng.between(1, 5);
    const auto full = rng.matching_lottery(n, rng.between(1, 4));
    RationalMatrix partial(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (rng.coin()) partial.at(i, j) = full.at(i, j) * Rational(rng.between(0, 4), 4);
      }
    }
    const auto x = complete_lottery(partial);
    CHECK_FALSE(doubly_stochastic_violation(x.matrix()));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) CHECK(x.at(i, j) >= partial.at(i, j));
    }
  }
}

TEST_CASE("complete_lottery_on_empty_cells") {
  RationalMatrix partial(2);
  partial.at(0, 0) = Rational(1, 2);
  // Greedy tops up the occupied cell; the empty-cell fill routes around it.
  CHECK(complete_lottery(partial).at(0, 0) == Rational(1));
  const auto x = complete_lottery_on_empty_cells(partial);
  CHECK(x.at(0, 0) == Rational(1, 2));
  CHECK(x.at(1, 1) == Rational(1, 2));

  RationalMatrix single(1);
  single.at(0, 0) = Rational(1, 3);
  CHECK(complete_lottery_on_empty_cells(single).at(0, 0) == Rational(1));

  Rng rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng.between(1, 4);
    const MatchingLottery full = rng.matching_lottery(n, 3);
    RationalMatrix scaled_down(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (rng.coin()) scaled_down.at(i, j) = full.at(i, j) * Rational(1, 2);
      }
    }
    const auto y = complete_lottery_on_empty_cells(scaled_down);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) CHECK(y.at(i, j) >= scaled_down.at(i, j));
    }
  }
}

TEST_CASE("top_choice_welfare") {
  const Quantile zero(Rational(0));
  const Quantile half(Rational(1, 2));
  {
    const OneSidedInstance distinct({pref_of({0, 1, 2}), pref_of({1, 0, 2}), pref_of({2, 1, 0})},
                                    {zero, half, Quantile(Rational(1))});
    CHECK(top_choice_welfare(distinct).count == 3);
  }
  {
    const OneSidedInstance crowded({pref_of({0, 1, 2}), pref_of({0, 2, 1}), pref_of({0, 1, 2})}, {half, half, zero});
    const auto out = top_choice_welfare(crowded);
    CHECK(out.count == 2);
    CHECK(max_top_choice_by_subsets(crowded) == 2);
    CHECK(out.outcome.lottery.at(0, 0) == Rational(1, 2));
    CHECK(out.outcome.lottery.at(1, 0) == Rational(1, 2));
  }
  {
    const OneSidedInstance pair({pref_of({0, 1}), pref_of({0, 1})}, {zero, zero});
    CHECK(top_choice_welfare(pair).count == 1);
  }
  {
    // An h = 1 agent needs positive mass, so it cannot share with an h = 0 agent.
    const OneSidedInstance certain({pref_of({0, 1}), pref_of({0, 1})}, {Quantile(Rational(1)), zero});
    CHECK(top_choice_welfare(certain).count == 1);
    CHECK(max_top_choice_by_subsets(certain) == 1);
    const OneSidedInstance both({pref_of({0, 1, 2}), pref_of({0, 1, 2}), pref_of({0, 2, 1})},
                                {Quantile(Rational(1)), Quantile(Rational(1)), half});
    CHECK(top_choice_welfare(both).count == 3);
  }
  Rng rng(13);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = random_instance(rng, rng.between(1, 5));
    const auto out = top_choice_welfare(inst);
    CHECK(out.count == max_top_choice_by_subsets(inst));
    CHECK_FALSE(doubly_stochastic_violation(out.outcome.lottery.matrix()));
  }
}

TEST_CASE("sd_mechanism examples") {
  for (int n = 1; n <= 4; ++n) {
    const Profile same(static_cast<std::size_t>(n), Preference::identity(n));
    const auto strict = sd_mechanism(OneSidedInstance(same, uniform_quantiles(n, Rational(0))));
    std::vector<int> staircase;
    for (int i = 1; i <= n; ++i) staircase.push_back(i);
    CHECK(strict.rep_ranks == staircase);
    const auto loose = sd_mechanism(OneSidedInstance(same, uniform_quantiles(n, Rational(1) - Rational(1, n))));
    CHECK(loose.rep_ranks == std::vector<int>(static_cast<std::size_t>(n), 1));
  }
  // Custom order lets agent 2 choose first.
  const OneSidedInstance inst({pref_of({0, 1}), pref_of({0, 1})}, uniform_quantiles(2, Rational(0)));
  const std::vector<int> reversed{1, 0};
  CHECK(sd_mechanism(inst, reversed).rep_ranks == std::vector<int>{2, 1});
  const std::vector<int> bad{0, 0};
  CHECK_THROWS_AS(sd_mechanism(inst, bad), std::invalid_argument);
}

TEST_CASE("sd_mechanism matches the lexicographic oracle and is efficient") {
  Rng rng(21);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = rng.between(1, 4);
    const auto inst = random_instance(rng, n);
    const auto out = sd_mechanism(inst);
    CHECK(out.rep_ranks[0] == 1);
    CHECK(out.rep_ranks == lex_min_ranks(inst, std::vector<int>(static_cast<std::size_t>(n), n)));
    CHECK(efficiency_check_one_sided(out.lottery, inst).efficient);
  }
}

TEST_CASE("sd_mechanism is strategyproof on every 3-agent profile") {
  for (const Rational& h : {Rational(0), Rational(1, 3), Rational(1, 2)}) {
    const auto audit = one_sided_sp_audit([](const OneSidedInstance& i) { return sd_mechanism(i); }, uniform_quantiles(3, h));
    CHECK(audit.passed());
    CHECK(audit.cases_examined == 216u * 3u * 5u);
  }
  const std::vector<Quantile> mixed{Quantile(Rational(0)), Quantile(Rational(1, 2)), Quantile(Rational(1))};
  CHECK(one_sided_sp_audit([](const OneSidedInstance& i) { return sd_mechanism(i); }, mixed).passed());
}

TEST_CASE("psd_mechanism on the counterexample instance") {
  const auto inst = psd_counterexample();
  CHECK(proportionality_floors(inst) == std::vector<int>{3, 2, 2});
  const auto out = psd_mechanism(inst);
  CHECK(out.rep_ranks == std::vector<int>{1, 1, 2});
  CHECK(representative(out.lottery.row(2), inst.preference(2), inst.quantile(2)) == 2);

  // The lottery exhibited for this instance realizes the same ranks.
  const MatchingLottery known(matrix_of({{1, 0, 0}, {0, Rational(2, 3), Rational(1, 3)}, {0, Rational(1, 3), Rational(2, 3)}}));
  CHECK(representative_ranks(known, inst) == out.rep_ranks);

  // Agent 3 reporting a > b > c ends up with b, her true top.
  Profile lie = inst.profile();
  lie[2] = pref_of({0, 1, 2});
  const auto manipulated = psd_mechanism(OneSidedInstance(lie, inst.quantiles()));
  CHECK(representative(manipulated.lottery.row(2), inst.preference(2), inst.quantile(2)) == 1);

  const auto audit = one_sided_sp_audit([](const OneSidedInstance& i) { return psd_mechanism(i); }, inst);
  REQUIRE_FALSE(audit.passed());
  CHECK(audit.counterexample->agent == 2);
  CHECK(audit.counterexample->truthful_rank == 2);
  CHECK(audit.counterexample->misreported_rank == 1);
}

TEST_CASE("psd_mechanism is proportional and efficient among proportional lotteries") {
  const OneSidedInstance certain({pref_of({0, 1, 2}), pref_of({0, 2, 1}), pref_of({1, 0, 2})}, uniform_quantiles(3, Rational(1)));
  CHECK(proportionality_floors(certain) == std::vector<int>{1, 1, 1});
  CHECK(psd_mechanism(certain).rep_ranks == std::vector<int>{1, 1, 1});

  Rng rng(34);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = rng.between(1, 4);
    const auto inst = random_instance(rng, n);
    const auto out = psd_mechanism(inst);
    CHECK(proportionality_check(out.lottery, inst).proportional);
    const auto floors = proportionality_floors(inst);
    CHECK_FALSE(dominated_within(inst, out.rep_ranks, floors));
    CHECK(out.rep_ranks == lex_min_ranks(inst, floors));
  }
}

TEST_CASE("proportionality_check") {
  Rng rng(2);
  for (int n = 1; n <= 4; ++n) {
    std::vector<Quantile> h;
    for (int i = 0; i < n; ++i) h.emplace_back(Rational(rng.below(12), 12));
    CHECK(proportionality_check(MatchingLottery::uniform(n), OneSidedInstance(rng.profile(n, n), h)).proportional);
  }
  const Profile same(4, Preference::identity(4));
  const OneSidedInstance inst(same, uniform_quantiles(4, Rational(1, 2)));
  const auto x = MatchingLottery::from_permutation(std::vector<int>{0, 1, 2, 3});
  const auto verdict = proportionality_check(x, inst);
  CHECK_FALSE(verdict.proportional);
  CHECK(verdict.violators == std::vector<int>{2, 3});
  // h = 0 only needs rank <= n.
  CHECK(proportionality_check(x, OneSidedInstance(same, uniform_quantiles(4, Rational(0)))).proportional);
}

TEST_CASE("envy_free_check") {
  const OneSidedInstance inst({pref_of({0, 1}), pref_of({0, 1})}, uniform_quantiles(2, Rational(0)));
  CHECK(envy_free_check(MatchingLottery::uniform(2), inst).envy_free);
  const auto verdict = envy_free_check(MatchingLottery::from_permutation(std::vector<int>{0, 1}), inst);
  CHECK_FALSE(verdict.envy_free);
  CHECK(verdict.envious == 1);
  CHECK(verdict.envied == 0);
}

TEST_CASE("envy-freeness implies proportionality on sampled lotteries") {
  Rng rng(55);
  int envy_free_seen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.between(1, 4);
    const auto inst = random_instance(rng, n);
    for (int s = 0; s < 50; ++s) {
      const auto x = rng.matching_lottery(n, rng.between(1, 3));
      if (!envy_free_check(x, inst).envy_free) continue;
      ++envy_free_seen;
      CHECK(proportionality_check(x, inst).proportional);
    }
  }
  CHECK(envy_free_seen > 0);
}

TEST_CASE("efficiency_check_one_sided") {
  const OneSidedInstance opposite({pref_of({0, 1}), pref_of({1, 0})}, uniform_quantiles(2, Rational(0)));
  const auto verdict = efficiency_check_one_sided(MatchingLottery::uniform(2), opposite);
  CHECK_FALSE(verdict.efficient);
  CHECK(verdict.row_ranks == std::vector<int>{2, 2});
  REQUIRE(verdict.dominating);
  CHECK(*verdict.dominating == MatchingLottery::from_permutation(std::vector<int>{0, 1}));
  CHECK(efficiency_check_one_sided(MatchingLottery::uniform(1), OneSidedInstance({pref_of({0})}, {Quantile()})).efficient);

  Rng rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.between(1, 3);
    const auto inst = random_instance(rng, n);
    const auto x = rng.matching_lottery(n, rng.between(1, 3));
    const auto v = efficiency_check_one_sided(x, inst);
    CHECK(v.efficient == !dominated_within(inst, v.row_ranks, std::vector<int>(static_cast<std::size_t>(n), n)));
  }
}

TEST_CASE("identical agents below h = 1/2 cannot have efficiency and envy-freeness together") {
  for (const Rational& h : {Rational(0), Rational(1, 4), Rational(5, 12)}) {
    const OneSidedInstance inst({pref_of({0, 1}), pref_of({0, 1})}, uniform_quantiles(2, h));
    int efficient_seen = 0;
    for (int k = 0; k <= 24; ++k) {
      const Rational t(k, 24);
      const MatchingLottery x(matrix_of({{t, Rational(1) - t}, {Rational(1) - t, t}}));
      if (!efficiency_check_one_sided(x, inst).efficient) continue;
      ++efficient_seen;
      CHECK_FALSE(envy_free_check(x, inst).envy_free);
    }
    CHECK(efficient_seen > 0);
  }
  // At h = 1/2 the uniform lottery is both.
  const OneSidedInstance half({pref_of({0, 1}), pref_of({0, 1})}, uniform_quantiles(2, Rational(1, 2)));
  CHECK(efficiency_check_one_sided(MatchingLottery::uniform(2), half).efficient);
  CHECK(envy_free_check(MatchingLottery::uniform(2), half).envy_free);
}
