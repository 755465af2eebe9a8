#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsc/audit.hpp"
#include "qsc/feasibility.hpp"
#include "qsc/matching_lottery.hpp"
#include "qsc/preference.hpp"

namespace qsc {

/// n agents (rows) ranking n items (columns), each agent with her own quantile.
class OneSidedInstance {
 public:
  /// Throws std::invalid_argument unless there are n >= 1 preferences over n
  /// items and n quantiles.
  OneSidedInstance(Profile profile, std::vector<Quantile> h);

  int size() const { return static_cast<int>(profile_.size()); }
  const Profile& profile() const { return profile_; }
  const std::vector<Quantile>& quantiles() const { return h_; }
  const Preference& preference(int agent) const { return profile_.at(static_cast<std::size_t>(agent)); }
  const Quantile& quantile(int agent) const { return h_.at(static_cast<std::size_t>(agent)); }

  /// Rank-requirement problem over this instance with every requirement vacuous.
  FeasibilityProblem feasibility() const { return FeasibilityProblem(profile_, h_); }

 private:
  Profile profile_;
  std::vector<Quantile> h_;
};

struct MechanismOutcome {
  MatchingLottery lottery;
  /// Representative rank of each agent (rows), by her reported preference.
  std::vector<int> rep_ranks;
  std::vector<std::string> log;
};

using OneSidedMechanism = std::function<MechanismOutcome(const OneSidedInstance&)>;

/// rep_ranks of each row of x.
std::vector<int> representative_ranks(const MatchingLottery& x, const OneSidedInstance& inst);

struct TopChoiceOutcome {
  MechanismOutcome outcome;
  /// Number of agents whose representative is their top item; maximal.
  int count = 0;
};

/// Per item, packs the agents ranking it first in non-increasing h (ties by
/// id) while their 1 - h demands fit in one unit, then completes the matrix.
/// Agents with h = 1 cost nothing but need strictly positive mass, so they
/// are only taken when the others leave a gap, whichever packing is larger.
TopChoiceOutcome top_choice_welfare(const OneSidedInstance& inst);

/// Serial dictatorship over rank requirements: agents in `order` (default
/// ascending ids) each fix the smallest feasible rank given earlier choices.
MechanismOutcome sd_mechanism(const OneSidedInstance& inst, std::span<const int> order = {});

/// Rank floors for proportionality: 1 when h = 1, else ceil(n (1 - h)).
std::vector<int> proportionality_floors(const OneSidedInstance& inst);

/// sd_mechanism started from the proportionality floors instead of n.
MechanismOutcome psd_mechanism(const OneSidedInstance& inst, std::span<const int> order = {});

struct ProportionalityVerdict {
  bool proportional = true;
  std::vector<int> violators;
};

ProportionalityVerdict proportionality_check(const MatchingLottery& x, const OneSidedInstance& inst);

struct EnvyVerdict {
  bool envy_free = true;
  /// First pair in scan order where `envious` prefers `envied`'s row,
  /// evaluated with the envious agent's own preference and quantile.
  int envious = -1;
  int envied = -1;
};

EnvyVerdict envy_free_check(const MatchingLottery& x, const OneSidedInstance& inst);

RankEfficiency efficiency_check_one_sided(const MatchingLottery& x, const OneSidedInstance& inst);

/// Doubly stochastic completion of a nonnegative matrix whose row and column
/// sums are at most one: fills residual deficits greedily, rows then columns
/// ascending. Throws std::invalid_argument if the precondition fails.
MatchingLottery complete_lottery(const RationalMatrix& partial);

/// Same precondition, but the deficits go only to cells that are zero in
/// `partial` whenever such a completion exists (a transportation problem on
/// those cells); otherwise falls back to complete_lottery.
MatchingLottery complete_lottery_on_empty_cells(const RationalMatrix& partial);

struct OneSidedCounterexample {
  Profile profile;
  std::vector<Quantile> h;
  int agent = -1;
  Preference deviation = Preference::identity(1);
  MatchingLottery truthful = MatchingLottery::uniform(1);
  MatchingLottery misreported = MatchingLottery::uniform(1);
  int truthful_rank = 0;
  int misreported_rank = 0;
};

/// Every profile of n agents over n items with quantiles h fixed; every
/// unilateral misreport. Ranks are judged by the true preference.
AuditResult<OneSidedCounterexample> one_sided_sp_audit(const OneSidedMechanism& mechanism, std::span<const Quantile> h);

/// Misreports of every agent at one fixed profile.
AuditResult<OneSidedCounterexample> one_sided_sp_audit(const OneSidedMechanism& mechanism, const OneSidedInstance& inst);

}  // namespace qsc
