#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qsc/matching_lottery.hpp"
#include "qsc/preference.hpp"
#include "qsc/rational.hpp"

namespace qsc {

enum class BoundSense { AtLeast, Greater, AtMost, Less };

/// Bound on the mass an agent receives on her top-`length` options:
/// sum_{rank(o) <= length} x(agent, o)  <sense>  bound.
struct PrefixBound {
  Side side = Side::Rows;
  int agent = 0;
  int length = 1;
  BoundSense sense = BoundSense::AtLeast;
  Rational bound;
};

/// Feasibility of doubly stochastic matrices under per-agent prefix bounds.
///
/// Row agents rank columns; in two-sided problems column agents rank rows.
/// The usual way to populate a problem is through rank requirements: agent i
/// with requirement r must end up with a representative of rank <= r, i.e.
/// mass >= 1 - h on her top-r options (positive mass when h = 1).
class FeasibilityProblem {
 public:
  FeasibilityProblem(std::vector<Preference> row_prefs, std::vector<Quantile> row_h,
                     std::vector<Preference> column_prefs = {}, std::vector<Quantile> column_h = {});

  int size() const { return static_cast<int>(row_prefs_.size()); }
  bool has_column_agents() const { return !column_prefs_.empty(); }

  const Preference& preference(Side side, int agent) const;
  const Quantile& quantile(Side side, int agent) const;

  /// Requirement r in [1, n]; n (the default) is vacuous.
  void set_rank_requirement(Side side, int agent, int max_rank);
  int rank_requirement(Side side, int agent) const;

  void add_bound(PrefixBound bound);

  /// Lower bound on an explicit option set; throws std::invalid_argument
  /// unless the set is exactly a rank prefix of the agent's preference.
  void add_prefix_set_bound(Side side, int agent, std::span<const Option> options, Rational lower);

  /// Every bound in force: those induced by rank requirements first, then the
  /// explicit ones.
  std::vector<PrefixBound> bounds() const;
  bool has_strict_bounds() const;

  /// Exact re-substitution: doubly stochastic and every bound satisfied.
  bool is_satisfied_by(const RationalMatrix& x) const;

 private:
  void check_agent(Side side, int agent) const;

  std::vector<Preference> row_prefs_;
  std::vector<Quantile> row_h_;
  std::vector<Preference> column_prefs_;
  std::vector<Quantile> column_h_;
  std::vector<int> row_rank_;
  std::vector<int> column_rank_;
  std::vector<PrefixBound> extra_;
};

/// Prefix bound equivalent to "representative rank <= max_rank"; nothing when
/// the requirement is vacuous (max_rank == number of options).
std::optional<PrefixBound> rank_requirement_bound(Side side, int agent, int options, const Quantile& h, int max_rank);

/// Reference engine: exact simplex. Strict bounds are handled by maximizing a
/// shared slack and accepting iff the optimum is positive. The witness is
/// re-validated before it is returned.
std::optional<MatchingLottery> lp_feasible(const FeasibilityProblem& problem);

/// Oracle engine: the same question as a circulation with lower bounds on a
/// network whose per-agent prefix chains carry the bounds, solved on integers
/// after scaling by the common denominator.
std::optional<MatchingLottery> flow_feasible(const FeasibilityProblem& problem);

/// True iff both engines agree on feasibility (and both witnesses validate).
bool cross_check_feasibility(const FeasibilityProblem& problem);

enum class RankSearch { Linear, Binary };

/// Smallest t such that tightening the agent's requirement to t stays
/// feasible. Throws std::invalid_argument if the problem is infeasible even
/// with a vacuous requirement for that agent.
int min_rank_for_agent(FeasibilityProblem problem, Side side, int agent, RankSearch search = RankSearch::Linear);

/// Pareto check on representative ranks. Agents are the problem's row agents
/// and, when present, its column agents.
struct RankEfficiency {
  bool efficient = true;
  std::vector<int> row_ranks;
  std::vector<int> column_ranks;
  /// Set when not efficient: who strictly improves, and a lottery that keeps
  /// every rank and lowers hers.
  Side improved_side = Side::Rows;
  int improved_agent = -1;
  std::optional<MatchingLottery> dominating;
};

/// Current representative ranks of every agent in x.
std::vector<int> representative_ranks(const MatchingLottery& x, const FeasibilityProblem& problem, Side side);

/// For each agent in turn (rows then columns, ascending ids) asks whether
/// "everyone at rank <= current, this agent at rank < current" is feasible.
/// Rank requirements already set on `problem` are overwritten; explicit
/// bounds stay in force.
RankEfficiency rank_efficiency(const MatchingLottery& x, FeasibilityProblem problem);

/// Prefix bound for a lottery over m alternatives.
struct VotingBound {
  Preference pref;
  int length = 1;
  BoundSense sense = BoundSense::AtLeast;
  Rational bound;
};

std::optional<VotingBound> voting_rank_bound(const Preference& pref, const Quantile& h, int max_rank);

/// A lottery over m alternatives meeting every bound, or nothing.
std::optional<Lottery> lp_feasible_voting(int m, std::span<const VotingBound> bounds);

}  // namespace qsc
