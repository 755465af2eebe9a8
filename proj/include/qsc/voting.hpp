#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsc/audit.hpp"
#include "qsc/preference.hpp"

namespace qsc {

/// n agents with strict preferences over the same m alternatives, each with
/// her own quantile.
class VotingInstance {
 public:
  /// Throws std::invalid_argument on an empty profile, mixed m, or a quantile
  /// count different from the number of agents.
  VotingInstance(Profile profile, std::vector<Quantile> h);

  int agents() const { return static_cast<int>(profile_.size()); }
  int alternatives() const { return profile_.front().size(); }
  const Profile& profile() const { return profile_; }
  const std::vector<Quantile>& quantiles() const { return h_; }

 private:
  Profile profile_;
  std::vector<Quantile> h_;
};

/// Representative rank of each agent under x.
std::vector<int> representative_ranks(const Lottery& x, const VotingInstance& inst);

struct VotingEfficiency {
  bool efficient = true;
  /// Representative ranks under the tested lottery.
  std::vector<int> ranks;
  /// When not efficient: the agent who strictly improves and a lottery that
  /// makes her better off without hurting anyone.
  int improved_agent = -1;
  std::optional<Lottery> dominating;
};

/// Pareto efficiency with respect to representatives. For each agent the
/// query "everyone keeps rank <= current, this agent gets rank < current" is
/// a prefix-bound feasibility problem.
VotingEfficiency is_efficient_lottery(const Lottery& x, const VotingInstance& inst);

/// The deterministic lottery on the common top alternative, which is efficient
/// for every quantile vector; nothing when the tops differ.
std::optional<Lottery> universally_efficient_lottery(const Profile& profile);

/// A voting rule sees the reported profile and the (fixed) quantile vector.
using VotingRule = std::function<Lottery(const Profile&, std::span<const Quantile>)>;

/// Plurality winner (ties to the lower alternative id) gets 1 - min h over its
/// supporters; the other alternative gets the rest. Requires m = 2.
Lottery r_plurality(const Profile& profile, std::span<const Quantile> h);

/// 1/2 on each of the two highest plurality scores (ties to lower ids).
/// Requires m = 3.
Lottery top2_half_rule(const Profile& profile, std::span<const Quantile> h);

/// 1/3 on each of three alternatives. Requires m = 3.
Lottery uniform_rule(const Profile& profile, std::span<const Quantile> h);

/// Deterministic lottery on the dictator's top alternative.
VotingRule dictatorship_rule(int dictator);

/// "r-plurality", "top2-half", "uniform" or "dictator"; throws
/// std::invalid_argument for anything else.
VotingRule rule_by_name(const std::string& name, int dictator = 0);

/// The exhaustive audit domain: every profile of n agents over m alternatives
/// with the quantile vector fixed.
struct VotingDomain {
  int agents = 1;
  int alternatives = 2;
  std::vector<Quantile> h;
};

struct VotingCounterexample {
  enum class Kind { Manipulation, Inefficiency, NonMonotone } kind = Kind::Manipulation;
  Profile profile;
  std::vector<Quantile> h;
  Lottery outcome = Lottery::uniform(1);
  int agent = -1;
  /// Manipulation / monotonicity: the misreport and the lottery it produces.
  std::optional<Preference> deviation;
  /// Deviation outcome, or the dominating lottery for Inefficiency.
  std::optional<Lottery> other;
};

/// Every profile (m!)^n, in odometer order over all_preferences(m).
std::vector<Profile> all_profiles(int agents, int alternatives);

/// First (profile, agent, misreport) where the agent's true-preference
/// representative strictly improves.
AuditResult<VotingCounterexample> strategyproofness_audit(const VotingRule& rule, const VotingDomain& domain);

/// First profile whose outcome is Pareto dominated.
AuditResult<VotingCounterexample> efficiency_audit(const VotingRule& rule, const VotingDomain& domain);

/// Two alternatives only: first (profile, agent with 0 > 1, flip to 1 > 0)
/// where the flip raises alternative 0's probability.
AuditResult<VotingCounterexample> is_monotone(const VotingRule& rule, const VotingDomain& domain);

/// Quantile at which a non-monotone jump t1 < t2 of alternative 0's
/// probability becomes a profitable manipulation: 1 - (t1 + t2) / 2.
Quantile manipulation_quantile(const Rational& t1, const Rational& t2);

/// The two-agent, three-alternative profiles used in the h in [1/3, 1/2)
/// argument; alternatives a, b, c are 0, 1, 2.
Profile profile_11();
Profile profile_12();
Profile profile_21();
Profile profile_22();

}  // namespace qsc
