#include "qsc/voting.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "qsc/feasibility.hpp"
#include "qsc/quantile.hpp"

namespace qsc {

VotingInstance::VotingInstance(Profile profile, std::vector<Quantile> h) : profile_(std::move(profile)), h_(std::move(h)) {
  if (profile_.empty()) throw std::invalid_argument("voting instance needs at least one agent");
  if (h_.size() != profile_.size()) throw std::invalid_argument("one quantile per agent required");
  for (const auto& p : profile_) {
    if (p.size() != profile_.front().size()) throw std::invalid_argument("preferences over different alternative sets");
  }
}

std::vector<int> representative_ranks(const Lottery& x, const VotingInstance& inst) {
  if (x.size() != inst.alternatives()) throw std::invalid_argument("lottery size does not match the instance");
  std::vector<int> ranks;
  for (int i = 0; i < inst.agents(); ++i) {
    ranks.push_back(representative_rank(x.probs(), inst.profile()[static_cast<std::size_t>(i)],
                                        inst.quantiles()[static_cast<std::size_t>(i)]));
  }
  return ranks;
}

VotingEfficiency is_efficient_lottery(const Lottery& x, const VotingInstance& inst) {
  VotingEfficiency verdict;
  verdict.ranks = representative_ranks(x, inst);
  const int n = inst.agents();
  for (int target = 0; target < n; ++target) {
    if (verdict.ranks[static_cast<std::size_t>(target)] == 1) continue;
    std::vector<VotingBound> bounds;
    for (int j = 0; j < n; ++j) {
      const int r = verdict.ranks[static_cast<std::size_t>(j)] - (j == target ? 1 : 0);
      if (auto b = voting_rank_bound(inst.profile()[static_cast<std::size_t>(j)], inst.quantiles()[static_cast<std::size_t>(j)], r)) {
        bounds.push_back(std::move(*b));
      }
    }
    if (auto y = lp_feasible_voting(inst.alternatives(), bounds)) {
      verdict.efficient = false;
      verdict.improved_agent = target;
      verdict.dominating = std::move(y);
      return verdict;
    }
  }
  return verdict;
}

std::optional<Lottery> universally_efficient_lottery(const Profile& profile) {
  if (profile.empty()) throw std::invalid_argument("empty profile");
  const Option top = profile.front().top();
  for (const auto& p : profile) {
    if (p.top() != top) return std::nullopt;
  }
  return Lottery::deterministic(profile.front().size(), top);
}

namespace {

void require_alternatives(const Profile& profile, std::span<const Quantile> h, int m, const char* rule) {
  if (profile.empty()) throw std::invalid_argument(std::string(rule) + ": empty profile");
  if (profile.front().size() != m) {
    throw std::invalid_argument(std::string(rule) + " needs exactly " + std::to_string(m) + " alternatives");
  }
  if (h.size() != profile.size()) throw std::invalid_argument(std::string(rule) + ": one quantile per agent required");
}

std::vector<int> plurality_scores(const Profile& profile) {
  std::vector<int> scores(static_cast<std::size_t>(profile.front().size()), 0);
  for (const auto& p : profile) ++scores[static_cast<std::size_t>(p.top())];
  return scores;
}

// Alternatives by plurality score, highest first, ties to the lower id.
std::vector<Option> plurality_order(const Profile& profile) {
  const auto scores = plurality_scores(profile);
  std::vector<Option> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Option a, Option b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  return order;
}

}  // namespace

Lottery r_plurality(const Profile& profile, std::span<const Quantile> h) {
  require_alternatives(profile, h, 2, "r-plurality");
  const Option winner = plurality_order(profile).front();
  Rational min_h(1);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i].top() == winner) min_h = std::min(min_h, h[i].value());
  }
  std::vector<Rational> p(2);
  p[static_cast<std::size_t>(winner)] = Rational(1) - min_h;
  p[static_cast<std::size_t>(1 - winner)] = min_h;
  return Lottery(std::move(p));
}

Lottery top2_half_rule(const Profile& profile, std::span<const Quantile> h) {
  require_alternatives(profile, h, 3, "top2-half");
  const auto order = plurality_order(profile);
  std::vector<Rational> p(3);
  p[static_cast<std::size_t>(order[0])] = Rational(1, 2);
  p[static_cast<std::size_t>(order[1])] = Rational(1, 2);
  return Lottery(std::move(p));
}

Lottery uniform_rule(const Profile& profile, std::span<const Quantile> h) {
  require_alternatives(profile, h, 3, "uniform");
  return Lottery::uniform(3);
}

VotingRule dictatorship_rule(int dictator) {
  if (dictator < 0) throw std::invalid_argument("dictator id must be nonnegative");
  return [dictator](const Profile& profile, std::span<const Quantile>) {
    if (dictator >= static_cast<int>(profile.size())) throw std::invalid_argument("dictator id out of range");
    const Preference& p = profile[static_cast<std::size_t>(dictator)];
    return Lottery::deterministic(p.size(), p.top());
  };
}

VotingRule rule_by_name(const std::string& name, int dictator) {
  if (name == "r-plurality") return r_plurality;
  if (name == "top2-half") return top2_half_rule;
  if (name == "uniform") return uniform_rule;
  if (name == "dictator") return dictatorship_rule(dictator);
  throw std::invalid_argument("unknown voting rule '" + name + "'");
}

std::vector<Profile> all_profiles(int agents, int alternatives) {
  if (agents < 1 || alternatives < 1) throw std::invalid_argument("profile domain needs agents and alternatives");
  const auto prefs = all_preferences(alternatives);
  std::vector<Profile> out;
  std::vector<std::size_t> digit(static_cast<std::size_t>(agents), 0);
  while (true) {
    Profile p;
    for (std::size_t d : digit) p.push_back(prefs[d]);
    out.push_back(std::move(p));
    std::size_t k = 0;
    while (k < digit.size() && ++digit[k] == prefs.size()) digit[k++] = 0;
    if (k == digit.size()) break;
  }
  return out;
}

namespace {

// Outcomes for the whole domain, indexed like all_profiles; profile index is
// the odometer value sum_i digit_i * (m!)^i.
struct DomainTable {
  std::vector<Preference> prefs;
  std::vector<Profile> profiles;
  std::vector<Lottery> outcomes;
  std::size_t base = 0;

  DomainTable(const VotingRule& rule, const VotingDomain& domain) {
    if (static_cast<int>(domain.h.size()) != domain.agents) throw std::invalid_argument("domain needs one quantile per agent");
    prefs = all_preferences(domain.alternatives);
    base = prefs.size();
    profiles = all_profiles(domain.agents, domain.alternatives);
    for (const auto& p : profiles) {
      Lottery x = rule(p, domain.h);
      if (x.size() != domain.alternatives) throw std::logic_error("rule returned a lottery of the wrong size");
      outcomes.push_back(std::move(x));
    }
  }

  std::size_t pref_index(const Preference& p) const {
    return static_cast<std::size_t>(std::find(prefs.begin(), prefs.end(), p) - prefs.begin());
  }

  // Index of profile `index` with agent i's digit replaced by `pref`.
  std::size_t with_report(std::size_t index, int agent, std::size_t pref) const {
    std::size_t weight = 1;
    for (int k = 0; k < agent; ++k) weight *= base;
    const std::size_t digit = (index / weight) % base;
    return index - digit * weight + pref * weight;
  }
};

}  // namespace

AuditResult<VotingCounterexample> strategyproofness_audit(const VotingRule& rule, const VotingDomain& domain) {
  const DomainTable table(rule, domain);
  AuditResult<VotingCounterexample> result;
  for (std::size_t index = 0; index < table.profiles.size(); ++index) {
    const Profile& truth = table.profiles[index];
    for (int i = 0; i < domain.agents; ++i) {
      const Preference& pref = truth[static_cast<std::size_t>(i)];
      const Quantile& h = domain.h[static_cast<std::size_t>(i)];
      const int honest = representative_rank(table.outcomes[index].probs(), pref, h);
      const std::size_t own = table.pref_index(pref);
      for (std::size_t d = 0; d < table.base; ++d) {
        if (d == own) continue;
        ++result.cases_examined;
        const Lottery& lied = table.outcomes[table.with_report(index, i, d)];
        if (representative_rank(lied.probs(), pref, h) < honest) {
          result.counterexample = VotingCounterexample{VotingCounterexample::Kind::Manipulation, truth, domain.h,
                                                       table.outcomes[index], i, table.prefs[d], lied};
          return result;
        }
      }
    }
  }
  return result;
}

AuditResult<VotingCounterexample> efficiency_audit(const VotingRule& rule, const VotingDomain& domain) {
  const DomainTable table(rule, domain);
  AuditResult<VotingCounterexample> result;
  for (std::size_t index = 0; index < table.profiles.size(); ++index) {
    ++result.cases_examined;
    const VotingInstance inst(table.profiles[index], domain.h);
    auto verdict = is_efficient_lottery(table.outcomes[index], inst);
    if (!verdict.efficient) {
      result.counterexample = VotingCounterexample{VotingCounterexample::Kind::Inefficiency, table.profiles[index], domain.h,
                                                   table.outcomes[index], verdict.improved_agent, std::nullopt,
                                                   std::move(verdict.dominating)};
      return result;
    }
  }
  return result;
}

AuditResult<VotingCounterexample> is_monotone(const VotingRule& rule, const VotingDomain& domain) {
  if (domain.alternatives != 2) throw std::invalid_argument("monotonicity is defined for two alternatives");
  const DomainTable table(rule, domain);
  const std::size_t flipped = table.pref_index(Preference({1, 0}));
  AuditResult<VotingCounterexample> result;
  for (std::size_t index = 0; index < table.profiles.size(); ++index) {
    const Profile& p = table.profiles[index];
    for (int i = 0; i < domain.agents; ++i) {
      if (p[static_cast<std::size_t>(i)].top() != 0) continue;
      ++result.cases_examined;
      const Lottery& after = table.outcomes[table.with_report(index, i, flipped)];
      if (after[0] > table.outcomes[index][0]) {
        result.counterexample = VotingCounterexample{VotingCounterexample::Kind::NonMonotone, p, domain.h,
                                                     table.outcomes[index], i, table.prefs[flipped], after};
        return result;
      }
    }
  }
  return result;
}

Quantile manipulation_quantile(const Rational& t1, const Rational& t2) {
  if (!(t1 < t2)) throw std::invalid_argument("manipulation quantile needs t1 < t2");
  return Quantile(Rational(1) - (t1 + t2) / Rational(2));
}

// a = 0, b = 1, c = 2.
Profile profile_11() { return {Preference({0, 2, 1}), Preference({1, 2, 0})}; }
Profile profile_12() { return {Preference({0, 2, 1}), Preference({1, 0, 2})}; }
Profile profile_21() { return {Preference({0, 1, 2}), Preference({1, 2, 0})}; }
Profile profile_22() { return {Preference({0, 1, 2}), Preference({1, 0, 2})}; }

}  // namespace qsc
