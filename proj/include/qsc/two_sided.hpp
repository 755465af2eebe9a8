#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qsc/audit.hpp"
#include "qsc/feasibility.hpp"
#include "qsc/matching_lottery.hpp"
#include "qsc/preference.hpp"

namespace qsc {

/// Two sides of n agents each. Side N indexes matrix rows and ranks the M
/// agents; side M indexes columns and ranks the N agents.
class TwoSidedInstance {
 public:
  TwoSidedInstance(Profile n_prefs, std::vector<Quantile> n_h, Profile m_prefs, std::vector<Quantile> m_h);

  int size() const { return static_cast<int>(n_prefs_.size()); }
  const Profile& preferences(Side side) const { return side == Side::Rows ? n_prefs_ : m_prefs_; }
  const std::vector<Quantile>& quantiles(Side side) const { return side == Side::Rows ? n_h_ : m_h_; }
  const Preference& preference(Side side, int agent) const { return preferences(side).at(static_cast<std::size_t>(agent)); }
  const Quantile& quantile(Side side, int agent) const { return quantiles(side).at(static_cast<std::size_t>(agent)); }

  /// Same instance with one agent's preference replaced.
  TwoSidedInstance with_preference(Side side, int agent, Preference pref) const;

  FeasibilityProblem feasibility() const { return FeasibilityProblem(n_prefs_, n_h_, m_prefs_, m_h_); }

 private:
  Profile n_prefs_;
  std::vector<Quantile> n_h_;
  Profile m_prefs_;
  std::vector<Quantile> m_h_;
};

/// Perfect matching: partner[i] is the M agent matched to N agent i.
class IntegralMatching {
 public:
  explicit IntegralMatching(std::vector<int> partner);

  int size() const { return static_cast<int>(partner_.size()); }
  int partner_of_row(int i) const { return partner_.at(static_cast<std::size_t>(i)); }
  int partner_of_column(int j) const;
  const std::vector<int>& partners() const { return partner_; }
  MatchingLottery lottery() const { return MatchingLottery::from_permutation(partner_); }

  friend bool operator==(const IntegralMatching&, const IntegralMatching&) = default;

 private:
  std::vector<int> partner_;
};

/// Gale-Shapley with the given side proposing, proposers in ascending id.
IntegralMatching deferred_acceptance(const TwoSidedInstance& inst, Side proposing);

/// First blocking pair (i, j) of an integral matching, scanning i then j.
std::optional<std::pair<int, int>> integral_blocking_pair(const IntegralMatching& mu, const TwoSidedInstance& inst);

/// Every stable perfect matching, by enumeration of all n! matchings.
std::vector<IntegralMatching> enumerate_stable_matchings(const TwoSidedInstance& inst);

/// 1/2 (N-proposing DA) + 1/2 (M-proposing DA).
MatchingLottery half_da(const TwoSidedInstance& inst);

struct Representatives {
  std::vector<int> of_rows;     // M agent per N agent
  std::vector<int> of_columns;  // N agent per M agent
};

Representatives representatives(const MatchingLottery& x, const TwoSidedInstance& inst);

/// First (i, j), i ascending then j ascending, where each prefers the other to
/// their representative; nothing means x is stable.
std::optional<std::pair<int, int>> stability_check(const MatchingLottery& x, const TwoSidedInstance& inst);

struct BirkhoffTerm {
  Rational weight;
  IntegralMatching matching;
};

/// Exact convex decomposition into permutation matrices by repeatedly
/// extracting a perfect matching from the positive support and subtracting
/// its smallest entry. At most n^2 - 2n + 2 terms.
std::vector<BirkhoffTerm> birkhoff_decompose(const MatchingLottery& x);

struct BMatchingOutcome {
  MatchingLottery lottery;
  /// Edges (i, j) of the maximum-weight b-matching, each carrying 1 - h.
  std::vector<std::pair<int, int>> edges;
  int b = 1;
  int weight = 0;
  /// Agents on either side whose representative is their top choice.
  int count = 0;
};

/// Weight of edge (i, j): one point for each endpoint ranking the other first.
int top_choice_weight(const TwoSidedInstance& inst, int i, int j);

/// Maximum-weight b-matching with b = floor(1 / (1 - h)), solved as min-cost
/// flow. Requires one common h < 1 for all 2n agents; throws
/// std::invalid_argument otherwise.
BMatchingOutcome topchoice_bmatching(const TwoSidedInstance& inst);

RankEfficiency efficiency_check_two_sided(const MatchingLottery& x, const TwoSidedInstance& inst);

struct TwoSidedOutcome {
  MatchingLottery lottery;
  std::vector<int> row_ranks;
  std::vector<int> column_ranks;
  std::vector<std::string> log;
};

/// Starts from N-proposing DA and applies Pareto improvements until none is
/// left. Throws std::logic_error if an intermediate lottery is unstable.
TwoSidedOutcome efficient_stable(const TwoSidedInstance& inst);

/// No two N agents share a representative, and no two M agents.
bool distinct_representatives(const MatchingLottery& x, const TwoSidedInstance& inst);

struct DrEfficiency {
  bool distinct = true;
  bool efficient = true;
  /// A dominating lottery with distinct representatives, when one exists.
  std::optional<MatchingLottery> dominating;
};

/// Pareto efficiency among lotteries with distinct representatives. Searches
/// every pair of representative bijections that weakly improves all agents
/// and strictly improves one, and checks it is realizable exactly. Throws
/// std::domain_error for n > 4.
DrEfficiency dr_efficiency_check(const MatchingLottery& x, const TwoSidedInstance& inst);

using TwoSidedMechanism = std::function<MatchingLottery(const TwoSidedInstance&)>;

struct TwoSidedCounterexample {
  TwoSidedInstance truth;
  Side side = Side::Rows;
  int agent = -1;
  Preference deviation = Preference::identity(1);
  MatchingLottery truthful = MatchingLottery::uniform(1);
  MatchingLottery misreported = MatchingLottery::uniform(1);
  int truthful_rank = 0;
  int misreported_rank = 0;
};

/// Every profile of both sides with the quantiles fixed, every unilateral
/// misreport; outcomes are computed on demand so the scan stops early.
AuditResult<TwoSidedCounterexample> two_sided_sp_audit(const TwoSidedMechanism& mechanism, std::span<const Quantile> n_h,
                                                        std::span<const Quantile> m_h);

/// `samples` random profiles (seeded), each with every unilateral misreport.
AuditResult<TwoSidedCounterexample> two_sided_sp_audit_sampled(const TwoSidedMechanism& mechanism,
                                                                std::span<const Quantile> n_h, std::span<const Quantile> m_h,
                                                                int samples, std::uint64_t seed);

/// Misreports of every agent at one profile.
AuditResult<TwoSidedCounterexample> two_sided_sp_audit(const TwoSidedMechanism& mechanism, const TwoSidedInstance& inst);

}  // namespace qsc
