#pragma once

#include <span>
#include <vector>

#include "qsc/preference.hpp"
#include "qsc/rational.hpp"

namespace qsc {

/// The h-quantile representative of a lottery for an agent.
///
/// For h = 1 this is the best option with positive probability. For h < 1 it
/// is the unique option o such that the mass strictly below o is <= h and the
/// mass weakly below o is > h ("below" in the agent's own ranking).
///
/// The span overload accepts any probability row (e.g. a row or column of a
/// doubly stochastic matrix); it must be nonnegative and sum to one.
Option representative(std::span<const Rational> x, const Preference& pref, const Quantile& h);
Option representative(const Lottery& x, const Preference& pref, const Quantile& h);

/// rank(pref, representative(...)).
int representative_rank(std::span<const Rational> x, const Preference& pref, const Quantile& h);

enum class LotteryPreference { PreferX, PreferY, Indifferent };

LotteryPreference compare_lotteries(const Lottery& x, const Lottery& y, const Preference& pref, const Quantile& h);

enum class Dominance { XDominates, YDominates, Equal, Incomparable };

/// Stochastic dominance: x dominates y iff, for every option, x puts no more
/// mass than y on the options weakly below it (strictly less somewhere).
Dominance sd_compare(const Lottery& x, const Lottery& y, const Preference& pref);

/// Distinct cumulative masses (weakly-below sums), ascending. The
/// representative is constant for h in [b_k, b_{k+1}).
std::vector<Rational> rep_breakpoints(const Lottery& x, const Preference& pref);

/// Quantiles at which representative(x) and representative(y) jointly need to
/// be tested to cover every h in [0, 1]: 0, each breakpoint of either lottery,
/// the midpoint of each gap between consecutive points, and 1.
std::vector<Rational> quantile_test_points(const Lottery& x, const Lottery& y, const Preference& pref);

/// Checks that "x weakly SD-dominates y" agrees with "rep(x) is weakly better
/// than rep(y) at every quantile". Always true; used as a property harness.
bool sd_equivalence_audit(const Lottery& x, const Lottery& y, const Preference& pref);

}  // namespace qsc
