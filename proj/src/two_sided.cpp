#include "qsc/two_sided.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "qsc/one_sided.hpp"
#include "qsc/quantile.hpp"

namespace qsc {

namespace {

std::size_t at(int k) { return static_cast<std::size_t>(k); }

const char* side_name(Side side) { return side == Side::Rows ? "N" : "M"; }

Side other(Side side) { return side == Side::Rows ? Side::Columns : Side::Rows; }

}  // namespace

TwoSidedInstance::TwoSidedInstance(Profile n_prefs, std::vector<Quantile> n_h, Profile m_prefs, std::vector<Quantile> m_h)
    : n_prefs_(std::move(n_prefs)), n_h_(std::move(n_h)), m_prefs_(std::move(m_prefs)), m_h_(std::move(m_h)) {
  const std::size_t n = n_prefs_.size();
  if (n == 0) throw std::invalid_argument("two-sided instance needs at least one agent per side");
  if (m_prefs_.size() != n) throw std::invalid_argument("both sides must have the same number of agents");
  if (n_h_.size() != n || m_h_.size() != n) throw std::invalid_argument("one quantile per agent required");
  for (const Profile* side : {&n_prefs_, &m_prefs_}) {
    for (const auto& p : *side) {
      if (p.size() != size()) throw std::invalid_argument("each agent must rank every agent on the other side");
    }
  }
}

TwoSidedInstance TwoSidedInstance::with_preference(Side side, int agent, Preference pref) const {
  TwoSidedInstance copy = *this;
  (side == Side::Rows ? copy.n_prefs_ : copy.m_prefs_).at(at(agent)) = std::move(pref);
  if (copy.preference(side, agent).size() != size()) throw std::invalid_argument("preference has the wrong length");
  return copy;
}

IntegralMatching::IntegralMatching(std::vector<int> partner) : partner_(std::move(partner)) {
  std::vector<bool> used(partner_.size(), false);
  for (int j : partner_) {
    if (j < 0 || at(j) >= partner_.size() || used[at(j)]) throw std::invalid_argument("matching must be a permutation");
    used[at(j)] = true;
  }
}

int IntegralMatching::partner_of_column(int j) const {
  const auto it = std::find(partner_.begin(), partner_.end(), j);
  if (it == partner_.end()) throw std::out_of_range("column out of range");
  return static_cast<int>(it - partner_.begin());
}

IntegralMatching deferred_acceptance(const TwoSidedInstance& inst, Side proposing) {
  const int n = inst.size();
  const Side receiving = other(proposing);
  std::vector<int> next(at(n), 1);       // rank of the next proposal
  std::vector<int> held(at(n), -1);      // receiver -> proposer
  std::vector<int> free;
  for (int p = n - 1; p >= 0; --p) free.push_back(p);
  while (!free.empty()) {
    const int p = free.back();
    free.pop_back();
    const int r = inst.preference(proposing, p).at_rank(next[at(p)]++);
    int& current = held[at(r)];
    if (current < 0) {
      current = p;
    } else if (inst.preference(receiving, r).prefers(p, current)) {
      free.push_back(current);
      current = p;
    } else {
      free.push_back(p);
    }
  }
  std::vector<int> partner(at(n));
  for (int r = 0; r < n; ++r) {
    if (proposing == Side::Rows) {
      partner[at(held[at(r)])] = r;
    } else {
      partner[at(r)] = held[at(r)];
    }
  }
  return IntegralMatching(std::move(partner));
}

std::optional<std::pair<int, int>> integral_blocking_pair(const IntegralMatching& mu, const TwoSidedInstance& inst) {
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (inst.preference(Side::Rows, i).prefers(j, mu.partner_of_row(i)) &&
          inst.preference(Side::Columns, j).prefers(i, mu.partner_of_column(j))) {
        return std::pair{i, j};
      }
    }
  }
  return std::nullopt;
}

std::vector<IntegralMatching> enumerate_stable_matchings(const TwoSidedInstance& inst) {
  std::vector<int> perm(at(inst.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<IntegralMatching> stable;
  do {
    IntegralMatching mu(perm);
    if (!integral_blocking_pair(mu, inst)) stable.push_back(std::move(mu));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return stable;
}

MatchingLottery half_da(const TwoSidedInstance& inst) {
  const auto a = deferred_acceptance(inst, Side::Rows).lottery();
  const auto b = deferred_acceptance(inst, Side::Columns).lottery();
  const int n = inst.size();
  RationalMatrix x(n);
  const Rational half(1, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) x.at(i, j) = half * (a.at(i, j) + b.at(i, j));
  }
  return MatchingLottery(std::move(x));
}

Representatives representatives(const MatchingLottery& x, const TwoSidedInstance& inst) {
  if (x.size() != inst.size()) throw std::invalid_argument("lottery size does not match the instance");
  Representatives reps;
  for (int a = 0; a < inst.size(); ++a) {
    reps.of_rows.push_back(representative(x.marginal(Side::Rows, a), inst.preference(Side::Rows, a), inst.quantile(Side::Rows, a)));
    reps.of_columns.push_back(
        representative(x.marginal(Side::Columns, a), inst.preference(Side::Columns, a), inst.quantile(Side::Columns, a)));
  }
  return reps;
}

std::optional<std::pair<int, int>> stability_check(const MatchingLottery& x, const TwoSidedInstance& inst) {
  const auto reps = representatives(x, inst);
  const int n = inst.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (inst.preference(Side::Rows, i).prefers(j, reps.of_rows[at(i)]) &&
          inst.preference(Side::Columns, j).prefers(i, reps.of_columns[at(j)])) {
        return std::pair{i, j};
      }
    }
  }
  return std::nullopt;
}

namespace {

// Kuhn's augmenting paths on the positive support.
bool augment(int i, const RationalMatrix& x, std::vector<int>& owner, std::vector<bool>& seen) {
  for (int j = 0; j < x.size(); ++j) {
    if (x.at(i, j).sign() <= 0 || seen[at(j)]) continue;
    seen[at(j)] = true;
    if (owner[at(j)] < 0 || augment(owner[at(j)], x, owner, seen)) {
      owner[at(j)] = i;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<BirkhoffTerm> birkhoff_decompose(const MatchingLottery& lottery) {
  RationalMatrix x = lottery.matrix();
  const int n = x.size();
  std::vector<BirkhoffTerm> terms;
  Rational remaining(1);
  while (remaining.sign() > 0) {
    std::vector<int> owner(at(n), -1);
    for (int i = 0; i < n; ++i) {
      std::vector<bool> seen(at(n), false);
      // A positive multiple of a doubly stochastic matrix always has one.
      if (!augment(i, x, owner, seen)) throw std::logic_error("support has no perfect matching");
    }
    std::vector<int> partner(at(n));
    for (int j = 0; j < n; ++j) partner[at(owner[at(j)])] = j;
    Rational weight = x.at(0, partner[0]);
    for (int i = 1; i < n; ++i) weight = std::min(weight, x.at(i, partner[at(i)]));
    for (int i = 0; i < n; ++i) x.at(i, partner[at(i)]) -= weight;
    remaining -= weight;
    terms.push_back({weight, IntegralMatching(std::move(partner))});
  }
  return terms;
}

int top_choice_weight(const TwoSidedInstance& inst, int i, int j) {
  return (inst.preference(Side::Rows, i).top() == j ? 1 : 0) + (inst.preference(Side::Columns, j).top() == i ? 1 : 0);
}

namespace {

// Successive shortest paths (Bellman-Ford) with unit augmentations; stops
// once no path of negative cost remains, which is optimal because the
// min-cost curve is convex in the flow value.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(at(nodes)) {}

  int add_arc(int u, int v, int cap, int cost) {
    arcs_.push_back({v, cap, cost});
    adj_[at(u)].push_back(static_cast<int>(arcs_.size()) - 1);
    arcs_.push_back({u, 0, -cost});
    adj_[at(v)].push_back(static_cast<int>(arcs_.size()) - 1);
    return static_cast<int>(arcs_.size()) - 2;
  }

  int flow_on(int arc) const { return arcs_[at(arc ^ 1)].cap; }

  void run(int s, int t) {
    const int inf = std::numeric_limits<int>::max();
    for (;;) {
      std::vector<int> dist(adj_.size(), inf);
      std::vector<int> via(adj_.size(), -1);
      dist[at(s)] = 0;
      for (std::size_t round = 0; round < adj_.size(); ++round) {
        bool changed = false;
        for (std::size_t u = 0; u < adj_.size(); ++u) {
          if (dist[u] == inf) continue;
          for (int a : adj_[u]) {
            const Arc& arc = arcs_[at(a)];
            if (arc.cap > 0 && dist[u] + arc.cost < dist[at(arc.to)]) {
              dist[at(arc.to)] = dist[u] + arc.cost;
              via[at(arc.to)] = a;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (dist[at(t)] == inf || dist[at(t)] >= 0) return;
      for (int v = t; v != s; v = arcs_[at(via[at(v)] ^ 1)].to) {
        arcs_[at(via[at(v)])].cap -= 1;
        arcs_[at(via[at(v)] ^ 1)].cap += 1;
      }
    }
  }

 private:
  struct Arc {
    int to;
    int cap;
    int cost;
  };
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
};

}  // namespace

BMatchingOutcome topchoice_bmatching(const TwoSidedInstance& inst) {
  const int n = inst.size();
  const Quantile h = inst.quantile(Side::Rows, 0);
  for (Side side : {Side::Rows, Side::Columns}) {
    for (const auto& q : inst.quantiles(side)) {
      if (!(q == h)) throw std::invalid_argument("top-choice b-matching needs one common quantile");
    }
  }
  if (h.is_one()) throw std::invalid_argument("top-choice b-matching needs h < 1");
  const Rational share = Rational(1) - h.value();
  BMatchingOutcome out{MatchingLottery::uniform(n), {}, static_cast<int>((Rational(1) / share).floor()), 0, 0};

  const int s = 2 * n;
  const int t = 2 * n + 1;
  MinCostFlow net(2 * n + 2);
  std::vector<std::pair<int, std::pair<int, int>>> candidate;
  for (int k = 0; k < n; ++k) {
    net.add_arc(s, k, out.b, 0);
    net.add_arc(n + k, t, out.b, 0);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int w = top_choice_weight(inst, i, j);
      if (w > 0) candidate.push_back({net.add_arc(i, n + j, 1, -w), {i, j}});
    }
  }
  net.run(s, t);

  RationalMatrix partial(n);
  for (const auto& [arc, edge] : candidate) {
    if (net.flow_on(arc) == 0) continue;
    out.edges.push_back(edge);
    out.weight += top_choice_weight(inst, edge.first, edge.second);
    partial.at(edge.first, edge.second) = share;
  }
  out.lottery = complete_lottery_on_empty_cells(partial);
  const auto reps = representatives(out.lottery, inst);
  for (int a = 0; a < n; ++a) {
    out.count += reps.of_rows[at(a)] == inst.preference(Side::Rows, a).top() ? 1 : 0;
    out.count += reps.of_columns[at(a)] == inst.preference(Side::Columns, a).top() ? 1 : 0;
  }
  return out;
}

RankEfficiency efficiency_check_two_sided(const MatchingLottery& x, const TwoSidedInstance& inst) {
  return rank_efficiency(x, inst.feasibility());
}

TwoSidedOutcome efficient_stable(const TwoSidedInstance& inst) {
  TwoSidedOutcome out{deferred_acceptance(inst, Side::Rows).lottery(), {}, {}, {"es: start from N-proposing DA"}};
  for (int step = 1;; ++step) {
    if (const auto pair = stability_check(out.lottery, inst)) {
      throw std::logic_error("efficient_stable: blocking pair (" + std::to_string(pair->first) + ", " +
                             std::to_string(pair->second) + ") after step " + std::to_string(step - 1));
    }
    RankEfficiency verdict = efficiency_check_two_sided(out.lottery, inst);
    out.row_ranks = verdict.row_ranks;
    out.column_ranks = verdict.column_ranks;
    if (verdict.efficient) break;
    out.log.push_back("es: step " + std::to_string(step) + " improves " + side_name(verdict.improved_side) + " agent " +
                      std::to_string(verdict.improved_agent));
    out.lottery = std::move(*verdict.dominating);
  }
  return out;
}

bool distinct_representatives(const MatchingLottery& x, const TwoSidedInstance& inst) {
  const auto reps = representatives(x, inst);
  for (const auto* r : {&reps.of_rows, &reps.of_columns}) {
    std::vector<int> sorted = *r;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  }
  return true;
}

namespace {

// Bounds forcing the representative to be exactly the option of rank r.
void require_exact_representative(FeasibilityProblem& problem, Side side, int agent, const Quantile& h, int r) {
  if (h.is_one()) {
    if (r > 1) problem.add_bound({side, agent, r - 1, BoundSense::AtMost, Rational(0)});
    problem.add_bound({side, agent, r, BoundSense::Greater, Rational(0)});
    return;
  }
  const Rational need = Rational(1) - h.value();
  problem.add_bound({side, agent, r, BoundSense::AtLeast, need});
  if (r > 1) problem.add_bound({side, agent, r - 1, BoundSense::Less, need});
}

// Bijections whose image for each agent has rank <= cap, with the number of
// agents strictly below their cap.
std::vector<std::pair<std::vector<int>, int>> capped_bijections(const Profile& prefs, const std::vector<int>& caps) {
  const int n = static_cast<int>(prefs.size());
  std::vector<int> perm(at(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<std::vector<int>, int>> out;
  do {
    int strict = 0;
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      const int r = prefs[at(a)].rank(perm[at(a)]);
      ok = r <= caps[at(a)];
      strict += r < caps[at(a)] ? 1 : 0;
    }
    if (ok) out.push_back({perm, strict});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

DrEfficiency dr_efficiency_check(const MatchingLottery& x, const TwoSidedInstance& inst) {
  const int n = inst.size();
  if (n > 4) throw std::domain_error("dr_efficiency_check enumerates representative bijections and supports n <= 4");
  DrEfficiency verdict;
  verdict.distinct = distinct_representatives(x, inst);
  const auto base = inst.feasibility();
  const auto row_caps = representative_ranks(x, base, Side::Rows);
  const auto column_caps = representative_ranks(x, base, Side::Columns);
  const auto sigmas = capped_bijections(inst.preferences(Side::Rows), row_caps);
  const auto taus = capped_bijections(inst.preferences(Side::Columns), column_caps);
  for (const auto& [sigma, sigma_strict] : sigmas) {
    for (const auto& [tau, tau_strict] : taus) {
      if (sigma_strict + tau_strict == 0) continue;
      FeasibilityProblem problem = base;
      for (int a = 0; a < n; ++a) {
        require_exact_representative(problem, Side::Rows, a, inst.quantile(Side::Rows, a),
                                     inst.preference(Side::Rows, a).rank(sigma[at(a)]));
        require_exact_representative(problem, Side::Columns, a, inst.quantile(Side::Columns, a),
                                     inst.preference(Side::Columns, a).rank(tau[at(a)]));
      }
      if (auto y = lp_feasible(problem)) {
        verdict.efficient = false;
        verdict.dominating = std::move(y);
        return verdict;
      }
    }
  }
  return verdict;
}

namespace {

int true_rank(const MatchingLottery& x, const TwoSidedInstance& truth, Side side, int agent) {
  return representative_rank(x.marginal(side, agent), truth.preference(side, agent), truth.quantile(side, agent));
}

// Profiles of all 2n agents as odometer digits over all_preferences(n):
// N agents are digits 0..n-1, M agents digits n..2n-1.
class TwoSidedDomain {
 public:
  TwoSidedDomain(const TwoSidedMechanism& mechanism, std::span<const Quantile> n_h, std::span<const Quantile> m_h)
      : mechanism_(mechanism), n_h_(n_h.begin(), n_h.end()), m_h_(m_h.begin(), m_h.end()) {
    if (n_h_.size() != m_h_.size() || n_h_.empty()) throw std::invalid_argument("quantile vectors must have equal positive length");
    n_ = static_cast<int>(n_h_.size());
    prefs_ = all_preferences(n_);
    size_ = 1;
    for (int k = 0; k < 2 * n_; ++k) size_ *= prefs_.size();
  }

  int n() const { return n_; }
  std::size_t base() const { return prefs_.size(); }
  std::size_t size() const { return size_; }
  const Preference& pref(std::size_t digit) const { return prefs_[digit]; }

  TwoSidedInstance instance(std::size_t index) const {
    Profile n_side;
    Profile m_side;
    for (int k = 0; k < 2 * n_; ++k, index /= base()) (k < n_ ? n_side : m_side).push_back(prefs_[index % base()]);
    return TwoSidedInstance(std::move(n_side), n_h_, std::move(m_side), m_h_);
  }

  const MatchingLottery& outcome(std::size_t index) {
    auto it = memo_.find(index);
    if (it == memo_.end()) it = memo_.emplace(index, mechanism_(instance(index))).first;
    return it->second;
  }

  // Every unilateral misreport at one profile index.
  bool scan(std::size_t index, AuditResult<TwoSidedCounterexample>& result) {
    const TwoSidedInstance truth = instance(index);
    std::size_t weight = 1;
    for (int k = 0; k < 2 * n_; ++k, weight *= base()) {
      const Side side = k < n_ ? Side::Rows : Side::Columns;
      const int agent = k % n_;
      const std::size_t own = (index / weight) % base();
      const int honest = true_rank(outcome(index), truth, side, agent);
      for (std::size_t d = 0; d < base(); ++d) {
        if (d == own) continue;
        ++result.cases_examined;
        const std::size_t lie = index - own * weight + d * weight;
        const int lied = true_rank(outcome(lie), truth, side, agent);
        if (lied < honest) {
          result.counterexample =
              TwoSidedCounterexample{truth, side, agent, prefs_[d], outcome(index), outcome(lie), honest, lied};
          return true;
        }
      }
    }
    return false;
  }

 private:
  const TwoSidedMechanism& mechanism_;
  std::vector<Quantile> n_h_;
  std::vector<Quantile> m_h_;
  int n_ = 0;
  std::vector<Preference> prefs_;
  std::size_t size_ = 0;
  std::unordered_map<std::size_t, MatchingLottery> memo_;
};

}  // namespace

AuditResult<TwoSidedCounterexample> two_sided_sp_audit(const TwoSidedMechanism& mechanism, std::span<const Quantile> n_h,
                                                        std::span<const Quantile> m_h) {
  TwoSidedDomain domain(mechanism, n_h, m_h);
  AuditResult<TwoSidedCounterexample> result;
  for (std::size_t index = 0; index < domain.size(); ++index) {
    if (domain.scan(index, result)) break;
  }
  return result;
}

AuditResult<TwoSidedCounterexample> two_sided_sp_audit_sampled(const TwoSidedMechanism& mechanism,
                                                                std::span<const Quantile> n_h, std::span<const Quantile> m_h,
                                                                int samples, std::uint64_t seed) {
  TwoSidedDomain domain(mechanism, n_h, m_h);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, domain.size() - 1);
  AuditResult<TwoSidedCounterexample> result;
  for (int s = 0; s < samples; ++s) {
    if (domain.scan(pick(rng), result)) break;
  }
  return result;
}

AuditResult<TwoSidedCounterexample> two_sided_sp_audit(const TwoSidedMechanism& mechanism, const TwoSidedInstance& inst) {
  const MatchingLottery truthful = mechanism(inst);
  AuditResult<TwoSidedCounterexample> result;
  for (Side side : {Side::Rows, Side::Columns}) {
    for (int a = 0; a < inst.size(); ++a) {
      const int honest = true_rank(truthful, inst, side, a);
      for (const auto& d : all_preferences(inst.size())) {
        if (d == inst.preference(side, a)) continue;
        ++result.cases_examined;
        MatchingLottery lied_lottery = mechanism(inst.with_preference(side, a, d));
        const int lied = true_rank(lied_lottery, inst, side, a);
        if (lied < honest) {
          result.counterexample = TwoSidedCounterexample{inst, side, a, d, truthful, std::move(lied_lottery), honest, lied};
          return result;
        }
      }
    }
  }
  return result;
}

}  // namespace qsc
