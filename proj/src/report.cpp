#include "qsc/report.hpp"

#include <limits>
#include <random>

#include "qsc/quantile.hpp"

namespace qsc::cli {

using nlohmann::ordered_json;
using io::Document;
using io::Kind;

namespace {

std::size_t at(int k) { return static_cast<std::size_t>(k); }

std::vector<std::string> letters(int m) {
  std::vector<std::string> out;
  for (int k = 0; k < m; ++k) out.emplace_back(1, static_cast<char>('a' + k));
  return out;
}

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int k = 1; k <= n; ++k) out.push_back(prefix + std::to_string(k));
  return out;
}

ordered_json name_list(const std::vector<int>& ids, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::array();
  for (int id : ids) out.push_back(names[at(id)]);
  return out;
}

ordered_json preference_json(const Preference& p, const std::vector<std::string>& names) {
  return name_list(p.order(), names);
}

ordered_json quantiles_json(const std::vector<Quantile>& h) {
  ordered_json out = ordered_json::array();
  for (const auto& q : h) out.push_back(q.value().str());
  return out;
}

ordered_json profile_json(const Profile& profile, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::array();
  for (const auto& p : profile) out.push_back(preference_json(p, names));
  return out;
}

const char* side_label(Side side) { return side == Side::Rows ? "N" : "M"; }

// Names of the agents on a side and of the options they rank.
const std::vector<std::string>& agents_of(const Document& doc, Side side) {
  return side == Side::Rows ? doc.agent_names : doc.option_names;
}
const std::vector<std::string>& options_of(const Document& doc, Side side) {
  return side == Side::Rows ? doc.option_names : doc.agent_names;
}

Document voting_document(const Profile& profile, const std::vector<Quantile>& h) {
  const int m = profile.front().size();
  return Document{Kind::Voting, numbered("", static_cast<int>(profile.size())), letters(m), VotingInstance(profile, h), {}};
}

Document one_sided_document(const OneSidedInstance& inst) {
  return Document{Kind::OneSided, numbered("", inst.size()), letters(inst.size()), inst, {}};
}

Document two_sided_document(const TwoSidedInstance& inst) {
  return Document{Kind::TwoSided, numbered("n", inst.size()), numbered("m", inst.size()), inst, {}};
}

// ---- per-agent representatives ----

ordered_json voting_agents(const Lottery& x, const Document& doc) {
  const auto& inst = std::get<VotingInstance>(doc.instance);
  ordered_json out = ordered_json::array();
  for (int i = 0; i < inst.agents(); ++i) {
    const auto& pref = inst.profile()[at(i)];
    const auto& h = inst.quantiles()[at(i)];
    const Option rep = representative(x, pref, h);
    out.push_back({{"name", doc.agent_names[at(i)]},
                   {"h", h.value().str()},
                   {"representative", doc.option_names[at(rep)]},
                   {"rank", pref.rank(rep)}});
  }
  return out;
}

ordered_json matching_agents(const MatchingLottery& x, const Document& doc) {
  ordered_json out = ordered_json::array();
  const bool two_sided = doc.kind == Kind::TwoSided;
  for (Side side : {Side::Rows, Side::Columns}) {
    if (side == Side::Columns && !two_sided) break;
    for (std::size_t a = 0; a < agents_of(doc, side).size(); ++a) {
      const int id = static_cast<int>(a);
      const Preference& pref = two_sided ? std::get<TwoSidedInstance>(doc.instance).preference(side, id)
                                         : std::get<OneSidedInstance>(doc.instance).preference(id);
      const Quantile& h = two_sided ? std::get<TwoSidedInstance>(doc.instance).quantile(side, id)
                                    : std::get<OneSidedInstance>(doc.instance).quantile(id);
      const Option rep = representative(x.marginal(side, id), pref, h);
      ordered_json entry;
      if (two_sided) entry["side"] = side_label(side);
      entry["name"] = agents_of(doc, side)[a];
      entry["h"] = h.value().str();
      entry["representative"] = options_of(doc, side)[at(rep)];
      entry["rank"] = pref.rank(rep);
      out.push_back(std::move(entry));
    }
  }
  return out;
}

// ---- checkers ----

ordered_json voting_efficiency(const Lottery& x, const Document& doc) {
  const auto verdict = is_efficient_lottery(x, std::get<VotingInstance>(doc.instance));
  ordered_json out{{"passed", verdict.efficient}};
  if (!verdict.efficient) {
    out["improved_agent"] = doc.agent_names[at(verdict.improved_agent)];
    out["dominating"] = io::lottery_json(*verdict.dominating);
  }
  return out;
}

ordered_json rank_efficiency_json(const RankEfficiency& verdict, const Document& doc) {
  ordered_json out{{"passed", verdict.efficient}};
  if (!verdict.efficient) {
    ordered_json who;
    if (doc.kind == Kind::TwoSided) who["side"] = side_label(verdict.improved_side);
    who["agent"] = agents_of(doc, verdict.improved_side)[at(verdict.improved_agent)];
    out["improved"] = std::move(who);
    out["dominating"] = io::lottery_json(*verdict.dominating);
  }
  return out;
}

ordered_json proportionality_json(const MatchingLottery& x, const Document& doc) {
  const auto verdict = proportionality_check(x, std::get<OneSidedInstance>(doc.instance));
  return {{"passed", verdict.proportional}, {"violators", name_list(verdict.violators, doc.agent_names)}};
}

ordered_json envy_json(const MatchingLottery& x, const Document& doc) {
  const auto verdict = envy_free_check(x, std::get<OneSidedInstance>(doc.instance));
  ordered_json out{{"passed", verdict.envy_free}};
  if (!verdict.envy_free) {
    out["envious"] = doc.agent_names[at(verdict.envious)];
    out["envied"] = doc.agent_names[at(verdict.envied)];
  }
  return out;
}

ordered_json stability_json(const MatchingLottery& x, const Document& doc) {
  const auto pair = stability_check(x, std::get<TwoSidedInstance>(doc.instance));
  ordered_json out{{"passed", !pair.has_value()}};
  if (pair) out["blocking_pair"] = {doc.agent_names[at(pair->first)], doc.option_names[at(pair->second)]};
  return out;
}

ordered_json distinct_json(const MatchingLottery& x, const Document& doc) {
  return {{"passed", distinct_representatives(x, std::get<TwoSidedInstance>(doc.instance))}};
}

ordered_json dr_efficiency_json(const MatchingLottery& x, const Document& doc) {
  const auto& inst = std::get<TwoSidedInstance>(doc.instance);
  if (inst.size() > 4) return {{"skipped", "enumeration is limited to n <= 4"}};
  const auto verdict = dr_efficiency_check(x, inst);
  ordered_json out{{"passed", verdict.distinct && verdict.efficient}, {"distinct", verdict.distinct}};
  if (verdict.dominating) out["dominating"] = io::lottery_json(*verdict.dominating);
  return out;
}

ordered_json matching_checks(const MatchingLottery& x, const Document& doc) {
  ordered_json checks;
  if (doc.kind == Kind::OneSided) {
    const auto& inst = std::get<OneSidedInstance>(doc.instance);
    checks["efficiency"] = rank_efficiency_json(efficiency_check_one_sided(x, inst), doc);
    checks["proportionality"] = proportionality_json(x, doc);
    checks["envy_freeness"] = envy_json(x, doc);
  } else {
    const auto& inst = std::get<TwoSidedInstance>(doc.instance);
    checks["stability"] = stability_json(x, doc);
    checks["efficiency"] = rank_efficiency_json(efficiency_check_two_sided(x, inst), doc);
    checks["distinct_representatives"] = distinct_json(x, doc);
    checks["dr_efficiency"] = dr_efficiency_json(x, doc);
  }
  return checks;
}

// ---- mechanisms by name ----

bool is_voting_rule(const std::string& name) {
  return name == "r-plurality" || name == "top2-half" || name == "uniform" || name == "dictator";
}
bool is_one_sided(const std::string& name) { return name == "sd" || name == "psd" || name == "top-choice"; }
bool is_two_sided(const std::string& name) {
  return name == "half-da" || name == "efficient-stable" || name == "topchoice-bmatching";
}

Kind kind_of_mechanism(const std::string& name) {
  if (is_voting_rule(name)) return Kind::Voting;
  if (is_one_sided(name)) return Kind::OneSided;
  if (is_two_sided(name)) return Kind::TwoSided;
  throw UsageError("unknown mechanism '" + name + "'");
}

void require_kind(const Document& doc, const std::string& mechanism) {
  const Kind want = kind_of_mechanism(mechanism);
  if (doc.kind != want) {
    throw UsageError("mechanism '" + mechanism + "' needs a " + io::kind_name(want) + " instance, got " +
                     io::kind_name(doc.kind));
  }
}

OneSidedMechanism one_sided_mechanism(const std::string& name, std::vector<int> order) {
  if (name == "sd") return [order](const OneSidedInstance& inst) { return sd_mechanism(inst, order); };
  if (name == "psd") return [order](const OneSidedInstance& inst) { return psd_mechanism(inst, order); };
  return [](const OneSidedInstance& inst) { return top_choice_welfare(inst).outcome; };
}

TwoSidedMechanism two_sided_mechanism(const std::string& name) {
  if (name == "half-da") return [](const TwoSidedInstance& inst) { return half_da(inst); };
  if (name == "efficient-stable") return [](const TwoSidedInstance& inst) { return efficient_stable(inst).lottery; };
  return [](const TwoSidedInstance& inst) { return topchoice_bmatching(inst).lottery; };
}

void check_order(const std::vector<int>& order, int n) {
  if (order.empty()) return;
  std::vector<bool> seen(at(n), false);
  if (static_cast<int>(order.size()) != n) throw UsageError("--order must list every agent exactly once");
  for (int a : order) {
    if (a < 0 || a >= n || seen[at(a)]) throw UsageError("--order must be a permutation of 0.." + std::to_string(n - 1));
    seen[at(a)] = true;
  }
}

// Mechanism preconditions surface as std::invalid_argument from the library.
template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

Report run_mechanism(const Document& input, const std::string& mechanism, const RunOptions& options) {
  require_kind(input, mechanism);
  const Document doc = options.h_override ? io::with_h_override(input, *options.h_override) : input;
  ordered_json body;
  body["mechanism"] = mechanism;
  body["kind"] = io::kind_name(doc.kind);
  body["input_digest"] = io::digest(input);
  if (options.h_override) body["h_override"] = options.h_override->value().str();

  std::vector<std::string> log;
  if (doc.kind == Kind::Voting) {
    const auto& inst = std::get<VotingInstance>(doc.instance);
    if (mechanism == "dictator" && (options.dictator < 0 || options.dictator >= inst.agents())) {
      throw UsageError("--dictator must name an agent index");
    }
    const Lottery x = guarded([&] { return rule_by_name(mechanism, options.dictator)(inst.profile(), inst.quantiles()); });
    body["lottery"] = io::lottery_json(x);
    body["agents"] = voting_agents(x, doc);
    body["checks"] = {{"efficiency", voting_efficiency(x, doc)}};
  } else if (doc.kind == Kind::OneSided) {
    const auto& inst = std::get<OneSidedInstance>(doc.instance);
    check_order(options.order, inst.size());
    MechanismOutcome out = guarded([&] { return one_sided_mechanism(mechanism, options.order)(inst); });
    body["lottery"] = io::lottery_json(out.lottery);
    body["agents"] = matching_agents(out.lottery, doc);
    if (mechanism == "top-choice") body["top_choice_count"] = top_choice_welfare(inst).count;
    body["checks"] = matching_checks(out.lottery, doc);
    body["notes"] = {"envy compares each agent's own row with every other row, both read through the agent's own "
                     "preference and quantile"};
    log = std::move(out.log);
  } else {
    const auto& inst = std::get<TwoSidedInstance>(doc.instance);
    MatchingLottery x = MatchingLottery::uniform(inst.size());
    ordered_json extra;
    if (mechanism == "half-da") {
      x = half_da(inst);
    } else if (mechanism == "efficient-stable") {
      auto out = efficient_stable(inst);
      x = std::move(out.lottery);
      log = std::move(out.log);
      body["notes"] = {"each improvement step lowers one agent's rank requirement while holding everyone else, "
                       "repeated until no agent can improve"};
    } else {
      const auto out = guarded([&] { return topchoice_bmatching(inst); });
      x = out.lottery;
      ordered_json edges = ordered_json::array();
      for (const auto& [i, j] : out.edges) edges.push_back({doc.agent_names[at(i)], doc.option_names[at(j)]});
      extra = {{"b", out.b}, {"weight", out.weight}, {"top_choice_count", out.count}, {"edges", std::move(edges)}};
    }
    body["lottery"] = io::lottery_json(x);
    body["agents"] = matching_agents(x, doc);
    if (!extra.is_null()) body["b_matching"] = std::move(extra);
    body["checks"] = matching_checks(x, doc);
  }
  body["log"] = log;
  return Report{std::move(body), 0};
}

Report run_check(const Document& doc, const std::string& property) {
  if (!doc.lottery) throw UsageError("check needs a document with a lottery field");
  ordered_json body;
  body["check"] = property;
  body["kind"] = io::kind_name(doc.kind);
  body["input_digest"] = io::digest(doc);
  ordered_json verdict;
  if (doc.kind == Kind::Voting) {
    const auto& x = std::get<Lottery>(*doc.lottery);
    if (property != "efficiency") throw UsageError("voting instances support only the efficiency check");
    body["agents"] = voting_agents(x, doc);
    verdict = voting_efficiency(x, doc);
  } else if (doc.kind == Kind::OneSided || doc.kind == Kind::TwoSided) {
    const auto& x = std::get<MatchingLottery>(*doc.lottery);
    body["agents"] = matching_agents(x, doc);
    if (property == "efficiency") {
      verdict = doc.kind == Kind::OneSided
                    ? rank_efficiency_json(efficiency_check_one_sided(x, std::get<OneSidedInstance>(doc.instance)), doc)
                    : rank_efficiency_json(efficiency_check_two_sided(x, std::get<TwoSidedInstance>(doc.instance)), doc);
    } else if (doc.kind == Kind::OneSided && property == "proportionality") {
      verdict = proportionality_json(x, doc);
    } else if (doc.kind == Kind::OneSided && property == "envy-freeness") {
      verdict = envy_json(x, doc);
    } else if (doc.kind == Kind::TwoSided && property == "stability") {
      verdict = stability_json(x, doc);
    } else if (doc.kind == Kind::TwoSided && property == "distinct-representatives") {
      verdict = distinct_json(x, doc);
    } else if (doc.kind == Kind::TwoSided && property == "dr-efficiency") {
      verdict = dr_efficiency_json(x, doc);
    } else {
      throw UsageError("property '" + property + "' does not apply to " + io::kind_name(doc.kind) + " instances");
    }
  } else {
    throw UsageError("lottery queries have no properties to check; use rep, compare or sd-compare");
  }
  const bool passed = verdict.value("passed", true);
  body["verdict"] = std::move(verdict);
  return Report{std::move(body), passed ? 0 : 1};
}

namespace {

const io::LotteryQuery& query_of(const Document& doc) {
  if (doc.kind != Kind::LotteryQuery) throw UsageError("expected a lottery_query document");
  return std::get<io::LotteryQuery>(doc.instance);
}

ordered_json rep_json(const Lottery& x, const io::LotteryQuery& q, const Document& doc) {
  const Option rep = representative(x, q.preference, q.h);
  ordered_json breakpoints = ordered_json::array();
  for (const auto& b : rep_breakpoints(x, q.preference)) breakpoints.push_back(b.str());
  return {{"representative", doc.option_names[at(rep)]}, {"rank", q.preference.rank(rep)}, {"breakpoints", breakpoints}};
}

const io::LotteryQuery& pair_query_of(const Document& doc) {
  const auto& q = query_of(doc);
  if (!q.y) throw UsageError("comparison needs both x and y");
  return q;
}

}  // namespace

Report run_rep(const Document& doc) {
  const auto& q = query_of(doc);
  ordered_json body{{"query", "rep"}, {"input_digest", io::digest(doc)}, {"h", q.h.value().str()}, {"x", rep_json(q.x, q, doc)}};
  if (q.y) body["y"] = rep_json(*q.y, q, doc);
  return Report{std::move(body), 0};
}

Report run_compare(const Document& doc) {
  const auto& q = pair_query_of(doc);
  const char* verdict = "indifferent";
  switch (compare_lotteries(q.x, *q.y, q.preference, q.h)) {
    case LotteryPreference::PreferX: verdict = "prefer_x"; break;
    case LotteryPreference::PreferY: verdict = "prefer_y"; break;
    case LotteryPreference::Indifferent: break;
  }
  return Report{{{"query", "compare"},
                 {"input_digest", io::digest(doc)},
                 {"h", q.h.value().str()},
                 {"x", rep_json(q.x, q, doc)},
                 {"y", rep_json(*q.y, q, doc)},
                 {"verdict", verdict}},
                0};
}

Report run_sd_compare(const Document& doc) {
  const auto& q = pair_query_of(doc);
  const char* verdict = "incomparable";
  switch (sd_compare(q.x, *q.y, q.preference)) {
    case Dominance::XDominates: verdict = "x_dominates"; break;
    case Dominance::YDominates: verdict = "y_dominates"; break;
    case Dominance::Equal: verdict = "equal"; break;
    case Dominance::Incomparable: break;
  }
  ordered_json points = ordered_json::array();
  for (const auto& p : quantile_test_points(q.x, *q.y, q.preference)) points.push_back(p.str());
  return Report{{{"query", "sd-compare"},
                 {"input_digest", io::digest(doc)},
                 {"verdict", verdict},
                 {"quantile_test_points", points},
                 {"quantile_scan_agrees", sd_equivalence_audit(q.x, *q.y, q.preference)}},
                0};
}

// ---- audits ----

namespace {

std::uint64_t saturating_power(std::uint64_t base, int exponent) {
  std::uint64_t out = 1;
  for (int k = 0; k < exponent; ++k) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

std::uint64_t factorial(int n) {
  std::uint64_t out = 1;
  for (int k = 2; k <= n; ++k) out *= static_cast<std::uint64_t>(k);
  return out;
}

void guard_domain(std::uint64_t size, const AuditOptions& options) {
  if (size > options.max_domain) {
    throw UsageError("exhaustive domain has " + std::to_string(size) + " profiles, above --max-domain " +
                     std::to_string(options.max_domain));
  }
}

ordered_json voting_counterexample(const VotingCounterexample& cx, const Document& names) {
  static const char* kinds[] = {"manipulation", "inefficiency", "non_monotone"};
  ordered_json out{{"type", kinds[static_cast<int>(cx.kind)]},
                   {"profile", profile_json(cx.profile, names.option_names)},
                   {"h", quantiles_json(cx.h)},
                   {"outcome", io::lottery_json(cx.outcome)}};
  if (cx.agent >= 0) out["agent"] = names.agent_names[at(cx.agent)];
  if (cx.deviation) out["deviation"] = preference_json(*cx.deviation, names.option_names);
  if (cx.other) out[cx.kind == VotingCounterexample::Kind::Inefficiency ? "dominating" : "deviation_outcome"] =
      io::lottery_json(*cx.other);
  return out;
}

ordered_json one_sided_counterexample(const OneSidedCounterexample& cx, const Document& names) {
  return {{"type", "manipulation"},
          {"profile", profile_json(cx.profile, names.option_names)},
          {"h", quantiles_json(cx.h)},
          {"agent", names.agent_names[at(cx.agent)]},
          {"deviation", preference_json(cx.deviation, names.option_names)},
          {"truthful", io::lottery_json(cx.truthful)},
          {"misreported", io::lottery_json(cx.misreported)},
          {"truthful_rank", cx.truthful_rank},
          {"misreported_rank", cx.misreported_rank}};
}

ordered_json two_sided_counterexample(const TwoSidedCounterexample& cx, const Document& names) {
  const Document doc{Kind::TwoSided, names.agent_names, names.option_names, cx.truth, {}};
  return {{"type", "manipulation"},
          {"instance", io::serialize_document(doc)},
          {"side", side_label(cx.side)},
          {"agent", agents_of(doc, cx.side)[at(cx.agent)]},
          {"deviation", preference_json(cx.deviation, options_of(doc, cx.side))},
          {"truthful", io::lottery_json(cx.truthful)},
          {"misreported", io::lottery_json(cx.misreported)},
          {"truthful_rank", cx.truthful_rank},
          {"misreported_rank", cx.misreported_rank}};
}

template <class Case, class ToJson>
Report finish_audit(ordered_json body, const AuditResult<Case>& result, ToJson&& to_json) {
  body["cases_examined"] = result.cases_examined;
  if (result.passed()) {
    body["result"] = "none found";
    return Report{std::move(body), 0};
  }
  body["result"] = "counterexample";
  body["counterexample"] = to_json(*result.counterexample);
  return Report{std::move(body), 1};
}

// Every unilateral misreport at one voting profile.
AuditResult<VotingCounterexample> voting_sp_single(const VotingRule& rule, const VotingInstance& inst) {
  AuditResult<VotingCounterexample> result;
  const Lottery truthful = rule(inst.profile(), inst.quantiles());
  for (int i = 0; i < inst.agents(); ++i) {
    const auto& pref = inst.profile()[at(i)];
    const auto& h = inst.quantiles()[at(i)];
    const int honest = pref.rank(representative(truthful, pref, h));
    for (const auto& d : all_preferences(inst.alternatives())) {
      if (d == pref) continue;
      ++result.cases_examined;
      Profile reported = inst.profile();
      reported[at(i)] = d;
      const Lottery lied = rule(reported, inst.quantiles());
      if (pref.rank(representative(lied, pref, h)) < honest) {
        result.counterexample =
            VotingCounterexample{VotingCounterexample::Kind::Manipulation, inst.profile(), inst.quantiles(), truthful, i, d, lied};
        return result;
      }
    }
  }
  return result;
}

// Efficiency of a matching mechanism on every profile in a list.
template <class Instance, class Run, class Check>
std::pair<std::uint64_t, std::optional<std::pair<Instance, MatchingLottery>>> matching_efficiency_scan(
    const std::vector<Instance>& instances, Run&& run, Check&& check) {
  std::uint64_t examined = 0;
  for (const auto& inst : instances) {
    ++examined;
    MatchingLottery x = run(inst);
    if (!check(x, inst).efficient) return {examined, std::pair{inst, std::move(x)}};
  }
  return {examined, std::nullopt};
}

ordered_json sd_equivalence_report(const AuditOptions& options, int& exit_code) {
  // Plain modulo draws keep the sequence identical across standard libraries.
  std::mt19937_64 gen(options.seed);
  auto below = [&](int n) { return static_cast<int>(gen() % static_cast<std::uint64_t>(n)); };
  auto lottery = [&](int m) {
    const int den = 1 + below(12);
    std::vector<int> units(at(m), 0);
    for (int u = 0; u < den; ++u) ++units[at(below(m))];
    std::vector<Rational> p;
    for (int k : units) p.emplace_back(k, den);
    return Lottery(std::move(p));
  };
  int passed = 0;
  ordered_json failure;
  for (int t = 0; t < options.trials; ++t) {
    const int m = 1 + below(6);
    std::vector<Option> order(at(m));
    for (int k = 0; k < m; ++k) order[at(k)] = k;
    for (int k = m - 1; k > 0; --k) std::swap(order[at(k)], order[at(below(k + 1))]);
    const Preference pref(order);
    const Lottery x = lottery(m);
    const Lottery y = lottery(m);
    if (sd_equivalence_audit(x, y, pref)) {
      ++passed;
    } else if (failure.is_null()) {
      failure = {{"trial", t}, {"preference", preference_json(pref, letters(m))}, {"x", io::lottery_json(x)}, {"y", io::lottery_json(y)}};
    }
  }
  exit_code = passed == options.trials ? 0 : 1;
  ordered_json body{{"suite", "sd-equivalence"}, {"trials", options.trials}, {"seed", options.seed},
                    {"passed", passed}, {"failed", options.trials - passed}};
  if (!failure.is_null()) body["first_failure"] = std::move(failure);
  return body;
}

}  // namespace

Report run_audit(const AuditOptions& options) {
  if (options.suite == "sd-equivalence") {
    if (options.trials < 0) throw UsageError("--trials must be nonnegative");
    int exit_code = 0;
    ordered_json body = sd_equivalence_report(options, exit_code);
    return Report{std::move(body), exit_code};
  }
  if (options.suite != "sp" && options.suite != "efficiency" && options.suite != "monotonicity") {
    throw UsageError("unknown audit suite '" + options.suite + "'");
  }
  if (options.mechanism.empty()) throw UsageError("audit " + options.suite + " needs --mechanism");
  const Kind kind = kind_of_mechanism(options.mechanism);
  if (options.suite == "monotonicity" && kind != Kind::Voting) throw UsageError("monotonicity applies to voting rules only");

  ordered_json body{{"suite", options.suite}, {"mechanism", options.mechanism}};
  std::optional<Document> fixed;
  if (options.fixture) {
    fixed = fixture(*options.fixture);
    if (fixed->kind != kind) throw UsageError("fixture '" + *options.fixture + "' is not a " + io::kind_name(kind) + " instance");
    body["domain"] = {{"fixture", *options.fixture}, {"input_digest", io::digest(*fixed)}};
  }
  if (!fixed && options.n < 1) throw UsageError("--n must be positive");
  const std::vector<Quantile> hv(at(fixed ? 0 : options.n), options.h);

  if (kind == Kind::Voting) {
    if (options.suite == "monotonicity" && fixed) throw UsageError("monotonicity audits whole domains, not fixtures");
    const int dictator = options.dictator;
    const VotingRule rule = guarded([&] { return rule_by_name(options.mechanism, dictator); });
    if (fixed) {
      const auto& inst = std::get<VotingInstance>(fixed->instance);
      if (options.suite == "sp") {
        return finish_audit(std::move(body), guarded([&] { return voting_sp_single(rule, inst); }),
                            [&](const auto& cx) { return voting_counterexample(cx, *fixed); });
      }
      const Lottery x = guarded([&] { return rule(inst.profile(), inst.quantiles()); });
      AuditResult<VotingCounterexample> result;
      result.cases_examined = 1;
      const auto verdict = is_efficient_lottery(x, inst);
      if (!verdict.efficient) {
        result.counterexample = VotingCounterexample{VotingCounterexample::Kind::Inefficiency, inst.profile(), inst.quantiles(), x,
                                                     verdict.improved_agent, std::nullopt, verdict.dominating};
      }
      return finish_audit(std::move(body), result, [&](const auto& cx) { return voting_counterexample(cx, *fixed); });
    }
    if (options.m < 1) throw UsageError("--m must be positive");
    const std::uint64_t size = saturating_power(factorial(options.m), options.n);
    guard_domain(size, options);
    body["domain"] = {{"kind", "voting"}, {"agents", options.n}, {"alternatives", options.m}, {"h", options.h.value().str()},
                      {"mode", "exhaustive"}, {"profiles", size}};
    const VotingDomain domain{options.n, options.m, hv};
    const Document names = voting_document(Profile(at(options.n), Preference::identity(options.m)), hv);
    auto to_json = [&](const auto& cx) { return voting_counterexample(cx, names); };
    if (options.suite == "sp") return finish_audit(std::move(body), guarded([&] { return strategyproofness_audit(rule, domain); }), to_json);
    if (options.suite == "efficiency") return finish_audit(std::move(body), guarded([&] { return efficiency_audit(rule, domain); }), to_json);
    return finish_audit(std::move(body), guarded([&] { return is_monotone(rule, domain); }), to_json);
  }

  if (kind == Kind::OneSided) {
    const OneSidedMechanism mechanism = one_sided_mechanism(options.mechanism, options.order);
    auto run = [&](const OneSidedInstance& inst) { return guarded([&] { return mechanism(inst).lottery; }); };
    std::vector<OneSidedInstance> instances;
    Document names = fixed ? *fixed : one_sided_document(OneSidedInstance(Profile(at(options.n), Preference::identity(options.n)), hv));
    if (fixed) {
      const auto& inst = std::get<OneSidedInstance>(fixed->instance);
      check_order(options.order, inst.size());
      if (options.suite == "sp") {
        return finish_audit(std::move(body), guarded([&] { return one_sided_sp_audit(mechanism, inst); }),
                            [&](const auto& cx) { return one_sided_counterexample(cx, names); });
      }
      instances.push_back(inst);
    } else {
      check_order(options.order, options.n);
      const std::uint64_t size = saturating_power(factorial(options.n), options.n);
      guard_domain(size, options);
      body["domain"] = {{"kind", "one_sided"}, {"agents", options.n}, {"h", options.h.value().str()}, {"mode", "exhaustive"},
                        {"profiles", size}};
      if (options.suite == "sp") {
        return finish_audit(std::move(body), guarded([&] { return one_sided_sp_audit(mechanism, hv); }),
                            [&](const auto& cx) { return one_sided_counterexample(cx, names); });
      }
      for (auto& p : all_profiles(options.n, options.n)) instances.emplace_back(std::move(p), hv);
    }
    const auto [examined, bad] = matching_efficiency_scan(instances, run, efficiency_check_one_sided);
    body["cases_examined"] = examined;
    if (!bad) {
      body["result"] = "none found";
      return Report{std::move(body), 0};
    }
    body["result"] = "counterexample";
    Document doc = names;
    doc.instance = bad->first;
    body["counterexample"] = {{"type", "inefficiency"}, {"instance", io::serialize_document(doc)}, {"outcome", io::lottery_json(bad->second)}};
    return Report{std::move(body), 1};
  }

  const TwoSidedMechanism mechanism = two_sided_mechanism(options.mechanism);
  auto run = [&](const TwoSidedInstance& inst) { return guarded([&] { return mechanism(inst); }); };
  const TwoSidedMechanism guarded_mechanism = run;
  const Document names = fixed ? *fixed
                               : two_sided_document(TwoSidedInstance(Profile(at(options.n), Preference::identity(options.n)), hv,
                                                                     Profile(at(options.n), Preference::identity(options.n)), hv));
  auto to_json = [&](const auto& cx) { return two_sided_counterexample(cx, names); };
  std::vector<TwoSidedInstance> instances;
  if (fixed) {
    const auto& inst = std::get<TwoSidedInstance>(fixed->instance);
    if (options.suite == "sp") return finish_audit(std::move(body), two_sided_sp_audit(guarded_mechanism, inst), to_json);
    instances.push_back(inst);
  } else if (options.suite == "sp" && options.samples > 0) {
    body["domain"] = {{"kind", "two_sided"}, {"agents_per_side", options.n}, {"h", options.h.value().str()}, {"mode", "sampled"},
                      {"samples", options.samples}, {"seed", options.seed}};
    return finish_audit(std::move(body),
                        two_sided_sp_audit_sampled(guarded_mechanism, hv, hv, options.samples, options.seed), to_json);
  } else {
    const std::uint64_t size = saturating_power(factorial(options.n), 2 * options.n);
    guard_domain(size, options);
    body["domain"] = {{"kind", "two_sided"}, {"agents_per_side", options.n}, {"h", options.h.value().str()},
                      {"mode", "exhaustive"}, {"profiles", size}};
    if (options.suite == "sp") return finish_audit(std::move(body), two_sided_sp_audit(guarded_mechanism, hv, hv), to_json);
    for (const auto& p : all_profiles(2 * options.n, options.n)) {
      instances.emplace_back(Profile(p.begin(), p.begin() + options.n), hv, Profile(p.begin() + options.n, p.end()), hv);
    }
  }
  const auto [examined, bad] = matching_efficiency_scan(instances, run, efficiency_check_two_sided);
  body["cases_examined"] = examined;
  if (!bad) {
    body["result"] = "none found";
    return Report{std::move(body), 0};
  }
  body["result"] = "counterexample";
  Document doc = names;
  doc.instance = bad->first;
  body["counterexample"] = {{"type", "inefficiency"}, {"instance", io::serialize_document(doc)}, {"outcome", io::lottery_json(bad->second)}};
  return Report{std::move(body), 1};
}

// ---- fixtures ----

namespace {

Preference pref(std::initializer_list<Option> order) { return Preference(std::vector<Option>(order)); }

}  // namespace

std::vector<FixtureInfo> fixture_list() {
  return {
      {"psd-counterexample", "one-sided, h = (0, 1/3, 1/3); agent 3 gains by misreporting under psd"},
      {"mixed-support-stable", "two-sided 2x2 lottery with entries 1/3 and 2/3, stable at h = 1/2 with an unstable matching in its support"},
      {"common-ranking", "two-sided 2x2 where everyone ranks the same partner first, h = 1/2; half-da is not efficient"},
      {"voting-acb-bca", "two agents over a, b, c with preferences acb and bca, h = 5/12"},
      {"voting-acb-bac", "two agents over a, b, c with preferences acb and bac, h = 5/12"},
      {"voting-abc-bca", "two agents over a, b, c with preferences abc and bca, h = 5/12"},
      {"voting-abc-bac", "two agents over a, b, c with preferences abc and bac, h = 5/12"},
  };
}

Document fixture(const std::string& name) {
  const Rational third(1, 3);
  if (name == "psd-counterexample") {
    return one_sided_document(OneSidedInstance({pref({0, 1, 2}), pref({1, 2, 0}), pref({1, 2, 0})},
                                               {Quantile(Rational(0)), Quantile(third), Quantile(third)}));
  }
  if (name == "mixed-support-stable" || name == "common-ranking") {
    const auto h = uniform_quantiles(2, Rational(1, 2));
    if (name == "common-ranking") {
      return two_sided_document(TwoSidedInstance({pref({0, 1}), pref({0, 1})}, h, {pref({0, 1}), pref({0, 1})}, h));
    }
    Document doc = two_sided_document(TwoSidedInstance({pref({1, 0}), pref({1, 0})}, h, {pref({0, 1}), pref({1, 0})}, h));
    RationalMatrix x(2);
    x.at(0, 0) = Rational(2, 3);
    x.at(0, 1) = third;
    x.at(1, 0) = third;
    x.at(1, 1) = Rational(2, 3);
    doc.lottery = MatchingLottery(std::move(x));
    return doc;
  }
  const auto h = uniform_quantiles(2, Rational(5, 12));
  if (name == "voting-acb-bca") return voting_document(profile_11(), h);
  if (name == "voting-acb-bac") return voting_document(profile_12(), h);
  if (name == "voting-abc-bca") return voting_document(profile_21(), h);
  if (name == "voting-abc-bac") return voting_document(profile_22(), h);
  throw UsageError("unknown fixture '" + name + "'");
}

}  // namespace qsc::cli
