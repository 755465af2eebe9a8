#include "qsc/one_sided.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "qsc/circulation.hpp"
#include "qsc/quantile.hpp"
#include "qsc/voting.hpp"

namespace qsc {

OneSidedInstance::OneSidedInstance(Profile profile, std::vector<Quantile> h) : profile_(std::move(profile)), h_(std::move(h)) {
  if (profile_.empty()) throw std::invalid_argument("one-sided instance needs at least one agent");
  if (h_.size() != profile_.size()) throw std::invalid_argument("one quantile per agent required");
  for (const auto& p : profile_) {
    if (p.size() != size()) throw std::invalid_argument("each agent must rank exactly n items");
  }
}

std::vector<int> representative_ranks(const MatchingLottery& x, const OneSidedInstance& inst) {
  return representative_ranks(x, inst.feasibility(), Side::Rows);
}

MatchingLottery complete_lottery(const RationalMatrix& partial) {
  const int n = partial.size();
  std::vector<Rational> row_gap(static_cast<std::size_t>(n));
  std::vector<Rational> column_gap(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    row_gap[static_cast<std::size_t>(k)] = Rational(1) - partial.row_sum(k);
    column_gap[static_cast<std::size_t>(k)] = Rational(1) - partial.column_sum(k);
    if (row_gap[static_cast<std::size_t>(k)].sign() < 0 || column_gap[static_cast<std::size_t>(k)].sign() < 0) {
      throw std::invalid_argument("partial lottery has a row or column sum above one");
    }
    for (int j = 0; j < n; ++j) {
      if (partial.at(k, j).sign() < 0) throw std::invalid_argument("partial lottery has a negative entry");
    }
  }
  RationalMatrix x = partial;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n && row_gap[static_cast<std::size_t>(i)].sign() > 0; ++j) {
      auto& rg = row_gap[static_cast<std::size_t>(i)];
      auto& cg = column_gap[static_cast<std::size_t>(j)];
      const Rational add = std::min(rg, cg);
      if (add.sign() == 0) continue;
      x.at(i, j) += add;
      rg -= add;
      cg -= add;
    }
  }
  return MatchingLottery(std::move(x));
}

MatchingLottery complete_lottery_on_empty_cells(const RationalMatrix& partial) {
  const int n = partial.size();
  mpz_class scale = 1;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) scale = lcm(scale, partial.at(i, j).denominator());
  }
  const auto scaled = [&](const Rational& r) {
    const mpz_class v = r.numerator() * (scale / r.denominator());
    if (!v.fits_slong_p()) throw std::overflow_error("completion denominators too large");
    return static_cast<flow::Capacity>(v.get_si());
  };
  if (!scale.fits_slong_p()) return complete_lottery(partial);

  // Rows 0..n-1, columns n..2n-1, source 2n, sink 2n+1; the sink-to-source
  // edge closes the circulation and every deficit edge is pinned.
  flow::CirculationProblem net;
  for (int k = 0; k < 2 * n + 2; ++k) net.add_node();
  const int s = 2 * n;
  const int t = 2 * n + 1;
  flow::Capacity total = 0;
  for (int k = 0; k < n; ++k) {
    const Rational row_gap = Rational(1) - partial.row_sum(k);
    const Rational column_gap = Rational(1) - partial.column_sum(k);
    if (row_gap.sign() < 0 || column_gap.sign() < 0) return complete_lottery(partial);
    net.add_edge(s, k, scaled(row_gap), scaled(row_gap));
    net.add_edge(n + k, t, scaled(column_gap), scaled(column_gap));
    total += scaled(row_gap);
  }
  std::vector<std::pair<int, std::pair<int, int>>> cells;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (partial.at(i, j).is_zero()) cells.push_back({net.add_edge(i, n + j, 0, total), {i, j}});
    }
  }
  net.add_edge(t, s, 0, total);
  const auto flow = net.solve();
  if (!flow) return complete_lottery(partial);
  RationalMatrix x = partial;
  const Rational unit = Rational(mpq_class(1, scale));
  for (const auto& [edge, cell] : cells) {
    x.at(cell.first, cell.second) = Rational((*flow)[static_cast<std::size_t>(edge)]) * unit;
  }
  return MatchingLottery(std::move(x));
}

TopChoiceOutcome top_choice_welfare(const OneSidedInstance& inst) {
  const int n = inst.size();
  RationalMatrix partial(n);
  std::vector<std::string> log;
  int packed_total = 0;
  for (Option g = 0; g < n; ++g) {
    std::vector<int> certain;  // h = 1
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
      if (inst.preference(i).top() != g) continue;
      (inst.quantile(i).is_one() ? certain : others).push_back(i);
    }
    std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
      return inst.quantile(a).value() > inst.quantile(b).value();
    });
    // Longest prefix of `others` whose demands total <= 1 (or < 1 when the
    // h = 1 agents must also get a share).
    auto pack = [&](bool strict) {
      std::vector<int> chosen;
      Rational used;
      for (int i : others) {
        const Rational next = used + (Rational(1) - inst.quantile(i).value());
        if (strict ? next >= Rational(1) : next > Rational(1)) break;
        used = next;
        chosen.push_back(i);
      }
      return std::make_pair(chosen, used);
    };
    auto [closed, closed_used] = pack(false);
    auto [open, open_used] = pack(true);
    const bool with_certain = !certain.empty() && certain.size() + open.size() > closed.size();
    const auto& chosen = with_certain ? open : closed;
    for (int i : chosen) partial.at(i, g) = Rational(1) - inst.quantile(i).value();
    if (with_certain) {
      const Rational share = (Rational(1) - open_used) / Rational(static_cast<long>(certain.size()));
      for (int i : certain) partial.at(i, g) = share;
    }
    const int packed = static_cast<int>(chosen.size() + (with_certain ? certain.size() : 0));
    packed_total += packed;
    if (packed > 0) log.push_back("item " + std::to_string(g) + ": " + std::to_string(packed) + " agent(s) packed");
  }
  MatchingLottery x = complete_lottery(partial);
  auto ranks = representative_ranks(x, inst);
  const int count = static_cast<int>(std::count(ranks.begin(), ranks.end(), 1));
  if (count != packed_total) throw std::logic_error("top-choice packing and completed lottery disagree");
  return {MechanismOutcome{std::move(x), std::move(ranks), std::move(log)}, count};
}

namespace {

std::vector<int> resolve_order(int n, std::span<const int> order) {
  std::vector<int> out(order.begin(), order.end());
  if (out.empty()) {
    out.resize(static_cast<std::size_t>(n));
    std::iota(out.begin(), out.end(), 0);
  }
  std::vector<int> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(static_cast<std::size_t>(n));
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted != expected) throw std::invalid_argument("agent order must be a permutation of 0..n-1");
  return out;
}

MechanismOutcome serial_dictatorship(const OneSidedInstance& inst, const std::vector<int>& initial, std::span<const int> order,
                                     const char* name) {
  const int n = inst.size();
  FeasibilityProblem problem = inst.feasibility();
  for (int i = 0; i < n; ++i) problem.set_rank_requirement(Side::Rows, i, initial[static_cast<std::size_t>(i)]);
  std::vector<std::string> log;
  for (int i : resolve_order(n, order)) {
    const int t = min_rank_for_agent(problem, Side::Rows, i);
    problem.set_rank_requirement(Side::Rows, i, t);
    log.push_back(std::string(name) + ": agent " + std::to_string(i) + " fixed at rank " + std::to_string(t));
  }
  auto x = lp_feasible(problem);
  if (!x) throw std::logic_error("final rank requirements infeasible");
  auto ranks = representative_ranks(*x, inst);
  for (int i = 0; i < n; ++i) {
    if (ranks[static_cast<std::size_t>(i)] != problem.rank_requirement(Side::Rows, i)) {
      throw std::logic_error("witness rank differs from the fixed requirement");
    }
  }
  return {std::move(*x), std::move(ranks), std::move(log)};
}

}  // namespace

MechanismOutcome sd_mechanism(const OneSidedInstance& inst, std::span<const int> order) {
  return serial_dictatorship(inst, std::vector<int>(static_cast<std::size_t>(inst.size()), inst.size()), order, "sd");
}

std::vector<int> proportionality_floors(const OneSidedInstance& inst) {
  const int n = inst.size();
  std::vector<int> floors;
  for (int i = 0; i < n; ++i) {
    const Quantile& h = inst.quantile(i);
    if (h.is_one()) {
      floors.push_back(1);
    } else {
      const mpz_class c = (Rational(n) * (Rational(1) - h.value())).ceil();
      floors.push_back(std::max(1, static_cast<int>(c.get_si())));
    }
  }
  return floors;
}

MechanismOutcome psd_mechanism(const OneSidedInstance& inst, std::span<const int> order) {
  return serial_dictatorship(inst, proportionality_floors(inst), order, "psd");
}

ProportionalityVerdict proportionality_check(const MatchingLottery& x, const OneSidedInstance& inst) {
  ProportionalityVerdict verdict;
  const auto floors = proportionality_floors(inst);
  const auto ranks = representative_ranks(x, inst);
  for (int i = 0; i < inst.size(); ++i) {
    if (ranks[static_cast<std::size_t>(i)] > floors[static_cast<std::size_t>(i)]) {
      verdict.proportional = false;
      verdict.violators.push_back(i);
    }
  }
  return verdict;
}

EnvyVerdict envy_free_check(const MatchingLottery& x, const OneSidedInstance& inst) {
  const int n = inst.size();
  if (x.size() != n) throw std::invalid_argument("lottery size does not match the instance");
  for (int i = 0; i < n; ++i) {
    const int own = representative_rank(x.row(i), inst.preference(i), inst.quantile(i));
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (representative_rank(x.row(j), inst.preference(i), inst.quantile(i)) < own) return {false, i, j};
    }
  }
  return {};
}

RankEfficiency efficiency_check_one_sided(const MatchingLottery& x, const OneSidedInstance& inst) {
  return rank_efficiency(x, inst.feasibility());
}

namespace {

int true_rank(const MatchingLottery& x, const OneSidedInstance& truth, int agent) {
  return representative_rank(x.row(agent), truth.preference(agent), truth.quantile(agent));
}

}  // namespace

AuditResult<OneSidedCounterexample> one_sided_sp_audit(const OneSidedMechanism& mechanism, std::span<const Quantile> h) {
  const int n = static_cast<int>(h.size());
  const auto prefs = all_preferences(n);
  const auto profiles = all_profiles(n, n);
  const std::vector<Quantile> hv(h.begin(), h.end());
  std::vector<MatchingLottery> outcomes;
  for (const auto& p : profiles) outcomes.push_back(mechanism(OneSidedInstance(p, hv)).lottery);

  // Odometer index: agent i's preference index has weight (n!)^i.
  const std::size_t base = prefs.size();
  AuditResult<OneSidedCounterexample> result;
  for (std::size_t index = 0; index < profiles.size(); ++index) {
    const OneSidedInstance truth(profiles[index], hv);
    std::size_t weight = 1;
    for (int i = 0; i < n; ++i, weight *= base) {
      const std::size_t own = (index / weight) % base;
      const int honest = true_rank(outcomes[index], truth, i);
      for (std::size_t d = 0; d < base; ++d) {
        if (d == own) continue;
        ++result.cases_examined;
        const std::size_t other = index - own * weight + d * weight;
        const int lied = true_rank(outcomes[other], truth, i);
        if (lied < honest) {
          result.counterexample =
              OneSidedCounterexample{profiles[index], hv, i, prefs[d], outcomes[index], outcomes[other], honest, lied};
          return result;
        }
      }
    }
  }
  return result;
}

AuditResult<OneSidedCounterexample> one_sided_sp_audit(const OneSidedMechanism& mechanism, const OneSidedInstance& inst) {
  const int n = inst.size();
  const MatchingLottery truthful = mechanism(inst).lottery;
  AuditResult<OneSidedCounterexample> result;
  for (int i = 0; i < n; ++i) {
    const int honest = true_rank(truthful, inst, i);
    for (const auto& d : all_preferences(n)) {
      if (d == inst.preference(i)) continue;
      ++result.cases_examined;
      Profile reported = inst.profile();
      reported[static_cast<std::size_t>(i)] = d;
      MatchingLottery lied_lottery = mechanism(OneSidedInstance(reported, inst.quantiles())).lottery;
      const int lied = true_rank(lied_lottery, inst, i);
      if (lied < honest) {
        result.counterexample =
            OneSidedCounterexample{inst.profile(), inst.quantiles(), i, d, truthful, std::move(lied_lottery), honest, lied};
        return result;
      }
    }
  }
  return result;
}

}  // namespace qsc
