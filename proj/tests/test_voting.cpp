#include <doctest.h>

#include <set>
#include <stdexcept>

#include "qsc/feasibility.hpp"
#include "qsc/quantile.hpp"
#include "qsc/voting.hpp"
#include "support/random_instances.hpp"

using namespace qsc;
using qsc::testing::lottery_of;
using qsc::testing::pref_of;
using qsc::testing::Rng;

namespace {

std::vector<Quantile> all_h(int n, const Rational& h) { return uniform_quantiles(n, h); }

// Enumerates every rank vector r <= c (componentwise, strictly somewhere) and
// asks whether some lottery gives each agent rank <= r.
bool dominated_by_enumeration(const Lottery& x, const VotingInstance& inst) {
  const int n = inst.agents();
  const int m = inst.alternatives();
  std::vector<int> c;
  for (int i = 0; i < n; ++i) {
    c.push_back(inst.profile()[static_cast<std::size_t>(i)].rank(
        representative(x, inst.profile()[static_cast<std::size_t>(i)], inst.quantiles()[static_cast<std::size_t>(i)])));
  }
  std::vector<int> r(static_cast<std::size_t>(n), 1);
  while (true) {
    bool within = true;
    bool strict = false;
    for (int i = 0; i < n; ++i) {
      within = within && r[static_cast<std::size_t>(i)] <= c[static_cast<std::size_t>(i)];
      strict = strict || r[static_cast<std::size_t>(i)] < c[static_cast<std::size_t>(i)];
    }
    if (within && strict) {
      std::vector<VotingBound> bounds;
      for (int i = 0; i < n; ++i) {
        if (auto b = voting_rank_bound(inst.profile()[static_cast<std::size_t>(i)], inst.quantiles()[static_cast<std::size_t>(i)],
                                       r[static_cast<std::size_t>(i)])) {
          bounds.push_back(*b);
        }
      }
      if (lp_feasible_voting(m, bounds)) return true;
    }
    int k = 0;
    while (k < n && ++r[static_cast<std::size_t>(k)] > m) r[static_cast<std::size_t>(k++)] = 1;
    if (k == n) return false;
  }
}

Lottery anti_monotone(const Profile& p, std::span<const Quantile>) {
  return p.front().top() == 1 ? Lottery::deterministic(2, 0) : Lottery::deterministic(2, 1);
}

// Alternative 0 gets 1/3 when agent 0 reports 0 > 1 and 2/3 otherwise.
Lottery fractional_anti_monotone(const Profile& p, std::span<const Quantile>) {
  return p.front().top() == 0 ? lottery_of({Rational(1, 3), Rational(2, 3)}) : lottery_of({Rational(2, 3), Rational(1, 3)});
}

Lottery constant_rule(const Profile& p, std::span<const Quantile>) { return Lottery::uniform(p.front().size()); }

bool alternative_dominated(const Profile& p, Option worse, Option better) {
  for (const auto& pref : p) {
    if (!pref.prefers(better, worse)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(VotingInstance({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(VotingInstance({pref_of({0, 1})}, {}), std::invalid_argument);
  CHECK_THROWS_AS(VotingInstance({pref_of({0, 1}), pref_of({0, 1, 2})}, all_h(2, Rational(0))), std::invalid_argument);
  CHECK_THROWS_AS(r_plurality({pref_of({0, 1, 2})}, all_h(1, Rational(0))), std::invalid_argument);
  CHECK_THROWS_AS(top2_half_rule({pref_of({0, 1})}, all_h(1, Rational(0))), std::invalid_argument);
  CHECK_THROWS_AS(rule_by_name("borda"), std::invalid_argument);
}

TEST_CASE("is_efficient_lottery examples") {
  const VotingInstance common({pref_of({0, 1, 2}), pref_of({0, 2, 1})}, all_h(2, Rational(1, 4)));
  CHECK(is_efficient_lottery(Lottery::deterministic(3, 0), common).efficient);

  const VotingInstance opposite({pref_of({0, 1}), pref_of({1, 0})}, all_h(2, Rational(0)));
  const auto verdict = is_efficient_lottery(Lottery::uniform(2), opposite);
  CHECK_FALSE(verdict.efficient);
  CHECK(verdict.ranks == std::vector<int>{2, 2});
  REQUIRE(verdict.dominating);
  // The witness keeps agent 1 at rank <= 2 and lifts the improved agent.
  const auto after = representative_ranks(*verdict.dominating, opposite);
  CHECK(after[static_cast<std::size_t>(verdict.improved_agent)] == 1);
  CHECK(dominated_by_enumeration(Lottery::uniform(2), opposite));
  CHECK_FALSE(dominated_by_enumeration(Lottery::deterministic(2, 0), opposite));
}

TEST_CASE("universally efficient lotteries exist only with a common top") {
  CHECK(*universally_efficient_lottery({pref_of({1, 0, 2}), pref_of({1, 2, 0})}) == Lottery::deterministic(3, 1));
  CHECK_FALSE(universally_efficient_lottery({pref_of({0, 1, 2}), pref_of({1, 0, 2})}));
  CHECK(*universally_efficient_lottery({pref_of({2, 0, 1})}) == Lottery::deterministic(3, 2));

  // With distinct tops, no lottery is efficient both at h = 0 and at
  // h = 1 - 1/l where l counts the distinct tops.
  Rng rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = rng.between(2, 3);
    const int n = rng.between(2, 3);
    const Profile p = rng.profile(n, m);
    if (universally_efficient_lottery(p)) continue;
    std::set<Option> tops;
    for (const auto& pref : p) tops.insert(pref.top());
    const Rational high = Rational(1) - Rational(1, static_cast<long>(tops.size()));
    const Lottery x = rng.lottery(m, 6);
    const bool at_zero = is_efficient_lottery(x, VotingInstance(p, all_h(n, Rational(0)))).efficient;
    const bool at_high = is_efficient_lottery(x, VotingInstance(p, all_h(n, high))).efficient;
    CHECK_FALSE((at_zero && at_high));
  }
}

TEST_CASE("efficiency check agrees with rank-vector enumeration") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = rng.between(2, 3);
    const int n = rng.between(1, 3);
    const VotingInstance inst(rng.profile(n, m), rng.quantiles(n));
    const Lottery x = rng.lottery(m);
    const auto verdict = is_efficient_lottery(x, inst);
    CHECK(verdict.efficient == !dominated_by_enumeration(x, inst));
    if (!verdict.efficient) {
      const auto before = verdict.ranks;
      const auto after = representative_ranks(*verdict.dominating, inst);
      for (int i = 0; i < n; ++i) CHECK(after[static_cast<std::size_t>(i)] <= before[static_cast<std::size_t>(i)]);
      CHECK(after[static_cast<std::size_t>(verdict.improved_agent)] < before[static_cast<std::size_t>(verdict.improved_agent)]);
    }
  }
}

TEST_CASE("r_plurality") {
  const Profile p{pref_of({0, 1}), pref_of({0, 1}), pref_of({1, 0})};
  const std::vector<Quantile> h{Quantile(Rational(1, 4)), Quantile(Rational(1, 2)), Quantile(Rational(0))};
  CHECK(r_plurality(p, h) == lottery_of({Rational(3, 4), Rational(1, 4)}));
  CHECK(r_plurality({pref_of({0, 1}), pref_of({0, 1})}, all_h(2, Rational(0))) == Lottery::deterministic(2, 0));
  // Tie goes to alternative 0.
  CHECK(r_plurality({pref_of({1, 0}), pref_of({0, 1})}, std::vector<Quantile>{Quantile(Rational(1, 3)), Quantile(Rational(1, 6))}) ==
        lottery_of({Rational(5, 6), Rational(1, 6)}));
  // Winner 1 with supporters' min h 1/3.
  CHECK(r_plurality({pref_of({1, 0}), pref_of({1, 0}), pref_of({0, 1})},
                    std::vector<Quantile>{Quantile(Rational(1, 3)), Quantile(Rational(2, 3)), Quantile(Rational(0))}) ==
        lottery_of({Rational(1, 3), Rational(2, 3)}));
}

TEST_CASE("top2_half_rule and uniform_rule") {
  const auto h = all_h(3, Rational(1, 2));
  CHECK(top2_half_rule({pref_of({0, 1, 2}), pref_of({0, 2, 1}), pref_of({1, 2, 0})}, h) ==
        lottery_of({Rational(1, 2), Rational(1, 2), Rational(0)}));
  CHECK(top2_half_rule({pref_of({0, 2, 1}), pref_of({0, 1, 2}), pref_of({0, 1, 2})}, h) ==
        lottery_of({Rational(1, 2), Rational(1, 2), Rational(0)}));
  CHECK(top2_half_rule({pref_of({2, 1, 0}), pref_of({2, 1, 0}), pref_of({1, 0, 2})}, h) ==
        lottery_of({Rational(0), Rational(1, 2), Rational(1, 2)}));

  // Only plurality scores matter: reshuffling everything below the tops
  // leaves the lottery unchanged.
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Profile p = rng.profile(3, 3);
    Profile q;
    for (const auto& pref : p) {
      auto order = pref.order();
      if (rng.coin()) std::swap(order[1], order[2]);
      q.emplace_back(std::move(order));
    }
    CHECK(top2_half_rule(p, h) == top2_half_rule(q, h));
  }

  const Profile any{pref_of({2, 0, 1}), pref_of({1, 2, 0})};
  CHECK(uniform_rule(any, all_h(2, Rational(0))) == Lottery::uniform(3));
  for (const Rational& hv : {Rational(2, 3), Rational(3, 4), Rational(1)}) {
    for (const auto& pref : all_preferences(3)) {
      CHECK(representative(Lottery::uniform(3), pref, Quantile(hv)) == pref.top());
    }
  }
}

TEST_CASE("dictatorship_rule") {
  const Profile p{pref_of({1, 0, 2}), pref_of({2, 0, 1})};
  CHECK(dictatorship_rule(0)(p, all_h(2, Rational(0))) == Lottery::deterministic(3, 1));
  CHECK(dictatorship_rule(1)(p, all_h(2, Rational(0))) == Lottery::deterministic(3, 2));
  CHECK_THROWS_AS(dictatorship_rule(2)(p, all_h(2, Rational(0))), std::invalid_argument);
  for (int n = 1; n <= 2; ++n) {
    for (int m = 2; m <= 3; ++m) {
      for (const Rational& h : {Rational(0), Rational(1, 2), Rational(1)}) {
        CHECK(strategyproofness_audit(dictatorship_rule(0), {n, m, all_h(n, h)}).passed());
      }
    }
  }
  CHECK(efficiency_audit(dictatorship_rule(0), {2, 3, all_h(2, Rational(1, 4))}).passed());
}

TEST_CASE("monotonicity audit") {
  for (int n = 1; n <= 3; ++n) {
    const VotingDomain domain{n, 2, all_h(n, Rational(1, 3))};
    CHECK(is_monotone(r_plurality, domain).passed());
    CHECK(is_monotone(constant_rule, domain).passed());
    const auto found = is_monotone(anti_monotone, domain);
    REQUIRE_FALSE(found.passed());
    CHECK(found.counterexample->agent == 0);
  }
  CHECK(all_profiles(3, 2).size() == 8);
  CHECK(all_profiles(2, 3).size() == 36);
}

TEST_CASE("monotone two-alternative rules are strategyproof at every grid quantile") {
  const auto grid = audit_h_grid();
  int monotone_domains = 0;
  Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = rng.between(1, 3);
    std::vector<Quantile> h;
    for (int i = 0; i < n; ++i) h.emplace_back(grid[static_cast<std::size_t>(rng.below(static_cast<int>(grid.size())))]);
    const VotingDomain domain{n, 2, h};
    for (const VotingRule& rule : {VotingRule(r_plurality), VotingRule(constant_rule), dictatorship_rule(0),
                                   VotingRule(anti_monotone), VotingRule(fractional_anti_monotone)}) {
      if (is_monotone(rule, domain).passed()) {
        ++monotone_domains;
        CHECK(strategyproofness_audit(rule, domain).passed());
      }
    }
  }
  CHECK(monotone_domains >= 120);
}

TEST_CASE("r_plurality audits across the quantile grid") {
  for (const Rational& hv : audit_h_grid()) {
    for (int n = 1; n <= 3; ++n) {
      const VotingDomain domain{n, 2, all_h(n, hv)};
      // A winner at 1 - h that loses a supporter drops to h, a rise once h > 1/2.
      CHECK(is_monotone(r_plurality, domain).passed() == (hv <= Rational(1, 2)));
      // At h = 1 the winner gets probability 0, so its supporters see the loser.
      const bool sound = hv < Rational(1);
      CHECK(strategyproofness_audit(r_plurality, domain).passed() == sound);
      CHECK(efficiency_audit(r_plurality, domain).passed() == sound);
    }
  }
  const auto found = is_monotone(r_plurality, {2, 2, all_h(2, Rational(2, 3))});
  REQUIRE(found.counterexample);
  CHECK(found.counterexample->outcome == lottery_of({Rational(1, 3), Rational(2, 3)}));
  CHECK(*found.counterexample->other == lottery_of({Rational(2, 3), Rational(1, 3)}));

  const auto manipulated = strategyproofness_audit(r_plurality, {1, 2, all_h(1, Rational(1))});
  REQUIRE(manipulated.counterexample);
  CHECK(manipulated.counterexample->outcome == Lottery::deterministic(2, 1));
  CHECK(*manipulated.counterexample->other == Lottery::deterministic(2, 0));
}

TEST_CASE("non-monotone rules are manipulable at the constructed quantile") {
  const Quantile h = manipulation_quantile(Rational(1, 3), Rational(2, 3));
  CHECK(h.value() == Rational(1, 2));
  const VotingDomain at_h{2, 2, {h, Quantile(Rational(0))}};
  const auto found = strategyproofness_audit(fractional_anti_monotone, at_h);
  REQUIRE_FALSE(found.passed());
  CHECK(found.counterexample->agent == 0);
  CHECK(found.counterexample->profile.front().top() == 0);
  // At h = 0 the same jump is not enough.
  CHECK(strategyproofness_audit(fractional_anti_monotone, {2, 2, all_h(2, Rational(0))}).passed());
  CHECK_THROWS_AS(manipulation_quantile(Rational(1, 2), Rational(1, 2)), std::invalid_argument);
}

TEST_CASE("three-alternative regimes at n = 2") {
  for (const Rational& h : {Rational(1, 2), Rational(7, 12)}) {
    const VotingDomain d{2, 3, all_h(2, h)};
    CHECK(efficiency_audit(top2_half_rule, d).passed());
    CHECK(strategyproofness_audit(top2_half_rule, d).passed());
  }
  for (const Rational& h : {Rational(2, 3), Rational(1)}) {
    const VotingDomain d{2, 3, all_h(2, h)};
    CHECK(efficiency_audit(uniform_rule, d).passed());
    CHECK(strategyproofness_audit(uniform_rule, d).passed());
  }
  // Below 2/3 the uniform lottery is no longer efficient on profiles with a
  // dominated alternative.
  CHECK_FALSE(efficiency_audit(uniform_rule, {2, 3, all_h(2, Rational(1, 2))}).passed());
}

TEST_CASE("two-agent fixture profiles") {
  CHECK(profile_11()[0] == pref_of({0, 2, 1}));
  CHECK(profile_21()[1] == pref_of({1, 2, 0}));
  // Only profile 11 has no Pareto-dominated alternative.
  auto has_dominated = [](const Profile& p) {
    for (Option w = 0; w < 3; ++w) {
      for (Option b = 0; b < 3; ++b) {
        if (w != b && alternative_dominated(p, w, b)) return true;
      }
    }
    return false;
  };
  CHECK_FALSE(has_dominated(profile_11()));
  CHECK(alternative_dominated(profile_12(), 2, 0));
  CHECK(alternative_dominated(profile_21(), 2, 1));
  CHECK(alternative_dominated(profile_22(), 2, 0));
  // In the [1/3, 1/2) regime the uniform lottery is dominated on profile 12
  // by returning a, but not on profile 11.
  const auto h = all_h(2, Rational(1, 3));
  const auto on_12 = is_efficient_lottery(Lottery::uniform(3), VotingInstance(profile_12(), h));
  CHECK_FALSE(on_12.efficient);
  CHECK(is_efficient_lottery(Lottery::deterministic(3, 0), VotingInstance(profile_12(), h)).efficient);
  CHECK(is_efficient_lottery(Lottery::uniform(3), VotingInstance(profile_11(), h)).efficient);
}
