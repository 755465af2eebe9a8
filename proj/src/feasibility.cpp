#include "qsc/feasibility.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "qsc/circulation.hpp"
#include "qsc/quantile.hpp"
#include "qsc/simplex.hpp"

namespace qsc {

namespace {

bool is_strict(BoundSense s) { return s == BoundSense::Greater || s == BoundSense::Less; }

bool holds(const Rational& value, BoundSense sense, const Rational& bound) {
  switch (sense) {
    case BoundSense::AtLeast: return value >= bound;
    case BoundSense::Greater: return value > bound;
    case BoundSense::AtMost: return value <= bound;
    case BoundSense::Less: return value < bound;
  }
  return false;
}

lp::Relation relation_of(BoundSense s) {
  return (s == BoundSense::AtLeast || s == BoundSense::Greater) ? lp::Relation::GreaterEqual : lp::Relation::LessEqual;
}

// Cell (row, column) variable index in the n x n matrix.
int cell(int n, int i, int j) { return i * n + j; }

std::vector<int> prefix_cells(const FeasibilityProblem& p, const PrefixBound& b) {
  const int n = p.size();
  const Preference& pref = p.preference(b.side, b.agent);
  std::vector<int> cells;
  for (int r = 1; r <= b.length; ++r) {
    const int other = pref.at_rank(r);
    cells.push_back(b.side == Side::Rows ? cell(n, b.agent, other) : cell(n, other, b.agent));
  }
  return cells;
}

// Appends `sum(cells) sense bound` to the program, using `slack_var` (if >= 0)
// to make strict senses closed: sum - e >= b  or  sum + e <= b.
void add_mass_constraint(lp::Program& prog, const std::vector<int>& cells, BoundSense sense, const Rational& bound,
                         int slack_var) {
  lp::Constraint c;
  for (int v : cells) c.terms.push_back({v, Rational(1)});
  if (is_strict(sense)) c.terms.push_back({slack_var, sense == BoundSense::Greater ? Rational(-1) : Rational(1)});
  c.relation = relation_of(sense);
  c.rhs = bound;
  prog.constraints.push_back(std::move(c));
}

// Solves the system with an extra slack variable when strict bounds exist;
// returns the values of the first `vars` variables when feasible.
std::optional<std::vector<Rational>> solve_with_strictness(lp::Program prog, int vars, bool strict) {
  if (strict) {
    const int slack = vars;
    prog.variables = vars + 1;
    prog.constraints.push_back({{{slack, Rational(1)}}, lp::Relation::LessEqual, Rational(1)});
    prog.objective.assign(static_cast<std::size_t>(vars + 1), Rational());
    prog.objective[static_cast<std::size_t>(slack)] = 1;
  }
  const lp::Solution sol = lp::maximize(prog);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  if (strict && sol.objective.sign() <= 0) return std::nullopt;
  std::vector<Rational> out(sol.values.begin(), sol.values.begin() + vars);
  return out;
}

std::int64_t to_int64(const mpz_class& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("scaled flow capacity does not fit in 64 bits");
  return z.get_si();
}

}  // namespace

FeasibilityProblem::FeasibilityProblem(std::vector<Preference> row_prefs, std::vector<Quantile> row_h,
                                       std::vector<Preference> column_prefs, std::vector<Quantile> column_h)
    : row_prefs_(std::move(row_prefs)),
      row_h_(std::move(row_h)),
      column_prefs_(std::move(column_prefs)),
      column_h_(std::move(column_h)) {
  const int n = size();
  if (n == 0) throw std::invalid_argument("feasibility problem with no agents");
  if (static_cast<int>(row_h_.size()) != n) throw std::invalid_argument("row quantile count mismatch");
  for (const auto& p : row_prefs_) {
    if (p.size() != n) throw std::invalid_argument("row preference length differs from n");
  }
  if (!column_prefs_.empty()) {
    if (static_cast<int>(column_prefs_.size()) != n || static_cast<int>(column_h_.size()) != n) {
      throw std::invalid_argument("column agents must number n, each with a quantile");
    }
    for (const auto& p : column_prefs_) {
      if (p.size() != n) throw std::invalid_argument("column preference length differs from n");
    }
  } else if (!column_h_.empty()) {
    throw std::invalid_argument("column quantiles without column preferences");
  }
  row_rank_.assign(static_cast<std::size_t>(n), n);
  column_rank_.assign(static_cast<std::size_t>(n), n);
}

void FeasibilityProblem::check_agent(Side side, int agent) const {
  if (side == Side::Columns && !has_column_agents()) throw std::invalid_argument("problem has no column agents");
  if (agent < 0 || agent >= size()) throw std::out_of_range("agent index " + std::to_string(agent) + " out of range");
}

const Preference& FeasibilityProblem::preference(Side side, int agent) const {
  check_agent(side, agent);
  return side == Side::Rows ? row_prefs_[static_cast<std::size_t>(agent)]
                            : column_prefs_[static_cast<std::size_t>(agent)];
}

const Quantile& FeasibilityProblem::quantile(Side side, int agent) const {
  check_agent(side, agent);
  return side == Side::Rows ? row_h_[static_cast<std::size_t>(agent)] : column_h_[static_cast<std::size_t>(agent)];
}

void FeasibilityProblem::set_rank_requirement(Side side, int agent, int max_rank) {
  check_agent(side, agent);
  if (max_rank < 1 || max_rank > size()) {
    throw std::invalid_argument("rank requirement " + std::to_string(max_rank) + " outside 1.." + std::to_string(size()));
  }
  (side == Side::Rows ? row_rank_ : column_rank_)[static_cast<std::size_t>(agent)] = max_rank;
}

int FeasibilityProblem::rank_requirement(Side side, int agent) const {
  check_agent(side, agent);
  return (side == Side::Rows ? row_rank_ : column_rank_)[static_cast<std::size_t>(agent)];
}

void FeasibilityProblem::add_bound(PrefixBound bound) {
  check_agent(bound.side, bound.agent);
  if (bound.length < 1 || bound.length > size()) throw std::invalid_argument("prefix length out of range");
  extra_.push_back(std::move(bound));
}

void FeasibilityProblem::add_prefix_set_bound(Side side, int agent, std::span<const Option> options, Rational lower) {
  const Preference& pref = preference(side, agent);
  const int k = static_cast<int>(options.size());
  if (k == 0 || k > size()) throw std::invalid_argument("prefix set must be non-empty and at most n options");
  std::vector<bool> in_set(static_cast<std::size_t>(size()), false);
  for (Option o : options) {
    if (o < 0 || o >= size() || in_set[static_cast<std::size_t>(o)]) {
      throw std::invalid_argument("prefix set has an invalid or repeated option");
    }
    in_set[static_cast<std::size_t>(o)] = true;
  }
  for (int r = 1; r <= k; ++r) {
    if (!in_set[static_cast<std::size_t>(pref.at_rank(r))]) {
      throw std::invalid_argument("option set is not a rank prefix of agent " + std::to_string(agent) + "'s preference");
    }
  }
  if (lower < Rational(0) || lower > Rational(1)) throw std::invalid_argument("prefix lower bound outside [0,1]");
  add_bound({side, agent, k, BoundSense::AtLeast, std::move(lower)});
}

std::optional<PrefixBound> rank_requirement_bound(Side side, int agent, int options, const Quantile& h, int max_rank) {
  if (max_rank >= options) return std::nullopt;
  if (h.is_one()) return PrefixBound{side, agent, max_rank, BoundSense::Greater, Rational(0)};
  return PrefixBound{side, agent, max_rank, BoundSense::AtLeast, Rational(1) - h.value()};
}

std::vector<PrefixBound> FeasibilityProblem::bounds() const {
  std::vector<PrefixBound> out;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    if (auto b = rank_requirement_bound(Side::Rows, i, n, row_h_[static_cast<std::size_t>(i)],
                                        row_rank_[static_cast<std::size_t>(i)])) {
      out.push_back(std::move(*b));
    }
  }
  if (has_column_agents()) {
    for (int j = 0; j < n; ++j) {
      if (auto b = rank_requirement_bound(Side::Columns, j, n, column_h_[static_cast<std::size_t>(j)],
                                          column_rank_[static_cast<std::size_t>(j)])) {
        out.push_back(std::move(*b));
      }
    }
  }
  out.insert(out.end(), extra_.begin(), extra_.end());
  return out;
}

bool FeasibilityProblem::has_strict_bounds() const {
  const auto all = bounds();
  return std::any_of(all.begin(), all.end(), [](const PrefixBound& b) { return is_strict(b.sense); });
}

bool FeasibilityProblem::is_satisfied_by(const RationalMatrix& x) const {
  if (x.size() != size() || doubly_stochastic_violation(x)) return false;
  const int n = size();
  for (const auto& b : bounds()) {
    Rational mass;
    for (int c : prefix_cells(*this, b)) mass += x.at(c / n, c % n);
    if (!holds(mass, b.sense, b.bound)) return false;
  }
  return true;
}

std::optional<MatchingLottery> lp_feasible(const FeasibilityProblem& problem) {
  const int n = problem.size();
  const int vars = n * n;
  lp::Program prog;
  prog.variables = vars;
  for (int i = 0; i < n; ++i) {
    lp::Constraint row{{}, lp::Relation::Equal, Rational(1)};
    lp::Constraint col{{}, lp::Relation::Equal, Rational(1)};
    for (int j = 0; j < n; ++j) {
      row.terms.push_back({cell(n, i, j), Rational(1)});
      col.terms.push_back({cell(n, j, i), Rational(1)});
    }
    prog.constraints.push_back(std::move(row));
    prog.constraints.push_back(std::move(col));
  }
  const auto bounds = problem.bounds();
  const bool strict = std::any_of(bounds.begin(), bounds.end(), [](const PrefixBound& b) { return is_strict(b.sense); });
  for (const auto& b : bounds) add_mass_constraint(prog, prefix_cells(problem, b), b.sense, b.bound, vars);

  auto values = solve_with_strictness(std::move(prog), vars, strict);
  if (!values) return std::nullopt;
  RationalMatrix x(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) x.at(i, j) = (*values)[static_cast<std::size_t>(cell(n, i, j))];
  }
  if (!problem.is_satisfied_by(x)) throw std::logic_error("simplex witness failed re-substitution");
  return MatchingLottery(std::move(x));
}

namespace {

// Tightest closed/open interval implied by all bounds on one prefix.
struct Interval {
  Rational lo{0};
  bool lo_strict = false;
  Rational hi{1};
  bool hi_strict = false;

  void apply(BoundSense sense, const Rational& b) {
    switch (sense) {
      case BoundSense::AtLeast:
        if (b > lo) { lo = b; lo_strict = false; }
        break;
      case BoundSense::Greater:
        if (b >= lo) { lo = b; lo_strict = true; }
        break;
      case BoundSense::AtMost:
        if (b < hi) { hi = b; hi_strict = false; }
        break;
      case BoundSense::Less:
        if (b <= hi) { hi = b; hi_strict = true; }
        break;
    }
  }

  bool contains(const Rational& v) const {
    return (lo_strict ? v > lo : v >= lo) && (hi_strict ? v < hi : v <= hi);
  }
  bool empty() const { return lo > hi || (lo == hi && (lo_strict || hi_strict)); }
};

struct StrictEdge {
  int edge;
  bool raise;
};

// Prefix chain of one agent: node per constrained prefix length, innermost last.
struct Chain {
  int root = -1;
  std::vector<std::pair<int, int>> nodes;  // (length, node), lengths descending

  int node_for_rank(int rank) const {
    int node = root;
    for (const auto& [length, id] : nodes) {
      if (rank <= length) node = id;
    }
    return node;
  }
};

}  // namespace

std::optional<MatchingLottery> flow_feasible(const FeasibilityProblem& problem) {
  const int n = problem.size();
  const auto bounds = problem.bounds();

  mpz_class common(1);
  for (const auto& b : bounds) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), b.bound.denominator().get_mpz_t());
  const flow::Capacity scale = to_int64(common);
  if (scale > std::numeric_limits<flow::Capacity>::max() / (4 * static_cast<flow::Capacity>(n))) {
    throw std::overflow_error("common denominator too large for the flow engine");
  }
  auto scaled = [&](const Rational& v) { return to_int64(mpz_class(v.numerator() * (common / v.denominator()))); };

  // (side, agent) -> prefix length -> interval
  std::map<std::pair<int, int>, std::map<int, Interval>> intervals;
  for (const auto& b : bounds) intervals[{static_cast<int>(b.side), b.agent}][b.length].apply(b.sense, b.bound);

  for (auto& [agent, by_length] : intervals) {
    for (auto it = by_length.begin(); it != by_length.end();) {
      if (it->second.empty()) return std::nullopt;
      if (it->first == n) {
        // The whole row/column always carries mass exactly one.
        if (!it->second.contains(Rational(1))) return std::nullopt;
        it = by_length.erase(it);
      } else {
        ++it;
      }
    }
  }

  flow::CirculationProblem net;
  const int source = net.add_node();
  const int sink = net.add_node();
  net.add_edge(sink, source, 0, scale * n);
  std::vector<StrictEdge> strict;

  auto build_chain = [&](Side side, int agent, bool outward) {
    Chain chain;
    chain.root = net.add_node();
    if (outward) {
      net.add_edge(source, chain.root, scale, scale);
    } else {
      net.add_edge(chain.root, sink, scale, scale);
    }
    auto found = intervals.find({static_cast<int>(side), agent});
    if (found == intervals.end()) return chain;
    int parent = chain.root;
    for (auto it = found->second.rbegin(); it != found->second.rend(); ++it) {
      const Interval& iv = it->second;
      const int node = net.add_node();
      const int e = outward ? net.add_edge(parent, node, scaled(iv.lo), scaled(iv.hi))
                            : net.add_edge(node, parent, scaled(iv.lo), scaled(iv.hi));
      if (iv.lo_strict) strict.push_back({e, true});
      if (iv.hi_strict) strict.push_back({e, false});
      chain.nodes.emplace_back(it->first, node);
      parent = node;
    }
    return chain;
  };

  std::vector<Chain> row_chain;
  std::vector<Chain> column_chain;
  for (int i = 0; i < n; ++i) row_chain.push_back(build_chain(Side::Rows, i, true));
  for (int j = 0; j < n; ++j) column_chain.push_back(build_chain(Side::Columns, j, false));

  std::vector<int> cell_edge(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int from = row_chain[static_cast<std::size_t>(i)].node_for_rank(problem.preference(Side::Rows, i).rank(j));
      const int to = problem.has_column_agents()
                         ? column_chain[static_cast<std::size_t>(j)].node_for_rank(problem.preference(Side::Columns, j).rank(i))
                         : column_chain[static_cast<std::size_t>(j)].root;
      cell_edge[static_cast<std::size_t>(cell(n, i, j))] = net.add_edge(from, to, 0, scale);
    }
  }

  std::vector<std::vector<flow::Capacity>> flows;
  if (strict.empty()) {
    auto f = net.solve();
    if (!f) return std::nullopt;
    flows.push_back(std::move(*f));
  } else {
    // Each strict bound is met by some circulation; their average meets all.
    for (const auto& s : strict) {
      auto f = net.solve_with_slack(s.edge, s.raise);
      if (!f) return std::nullopt;
      flows.push_back(std::move(*f));
    }
  }
  for (const auto& f : flows) {
    if (!net.is_feasible(f)) throw std::logic_error("circulation failed its own bound check");
  }

  RationalMatrix x(n);
  const Rational denom = Rational(static_cast<long>(flows.size())) * Rational(scale);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Rational total;
      for (const auto& f : flows) total += Rational(f[static_cast<std::size_t>(cell_edge[static_cast<std::size_t>(cell(n, i, j))])]);
      x.at(i, j) = total / denom;
    }
  }
  if (!problem.is_satisfied_by(x)) throw std::logic_error("flow witness failed re-substitution");
  return MatchingLottery(std::move(x));
}

bool cross_check_feasibility(const FeasibilityProblem& problem) {
  const auto by_simplex = lp_feasible(problem);
  const auto by_flow = flow_feasible(problem);
  return by_simplex.has_value() == by_flow.has_value();
}

int min_rank_for_agent(FeasibilityProblem problem, Side side, int agent, RankSearch search) {
  const int n = problem.size();
  auto feasible_at = [&](int t) {
    problem.set_rank_requirement(side, agent, t);
    return lp_feasible(problem).has_value();
  };
  if (!feasible_at(n)) throw std::invalid_argument("problem infeasible even with a vacuous requirement");
  if (search == RankSearch::Linear) {
    for (int t = 1; t < n; ++t) {
      if (feasible_at(t)) return t;
    }
    return n;
  }
  int lo = 1;
  int hi = n;  // feasible
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (feasible_at(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return hi;
}

std::vector<int> representative_ranks(const MatchingLottery& x, const FeasibilityProblem& problem, Side side) {
  if (x.size() != problem.size()) throw std::invalid_argument("lottery size does not match the problem");
  std::vector<int> ranks;
  for (int a = 0; a < problem.size(); ++a) {
    ranks.push_back(representative_rank(x.marginal(side, a), problem.preference(side, a), problem.quantile(side, a)));
  }
  return ranks;
}

RankEfficiency rank_efficiency(const MatchingLottery& x, FeasibilityProblem problem) {
  RankEfficiency verdict;
  verdict.row_ranks = representative_ranks(x, problem, Side::Rows);
  if (problem.has_column_agents()) verdict.column_ranks = representative_ranks(x, problem, Side::Columns);
  auto set_all = [&] {
    for (int a = 0; a < problem.size(); ++a) {
      problem.set_rank_requirement(Side::Rows, a, verdict.row_ranks[static_cast<std::size_t>(a)]);
      if (problem.has_column_agents()) {
        problem.set_rank_requirement(Side::Columns, a, verdict.column_ranks[static_cast<std::size_t>(a)]);
      }
    }
  };
  for (Side side : {Side::Rows, Side::Columns}) {
    if (side == Side::Columns && !problem.has_column_agents()) break;
    const auto& ranks = side == Side::Rows ? verdict.row_ranks : verdict.column_ranks;
    for (int a = 0; a < problem.size(); ++a) {
      const int current = ranks[static_cast<std::size_t>(a)];
      if (current == 1) continue;
      set_all();
      problem.set_rank_requirement(side, a, current - 1);
      if (auto y = lp_feasible(problem)) {
        verdict.efficient = false;
        verdict.improved_side = side;
        verdict.improved_agent = a;
        verdict.dominating = std::move(y);
        return verdict;
      }
    }
  }
  return verdict;
}

std::optional<VotingBound> voting_rank_bound(const Preference& pref, const Quantile& h, int max_rank) {
  if (max_rank < 1 || max_rank > pref.size()) throw std::invalid_argument("rank requirement out of range");
  if (max_rank == pref.size()) return std::nullopt;
  if (h.is_one()) return VotingBound{pref, max_rank, BoundSense::Greater, Rational(0)};
  return VotingBound{pref, max_rank, BoundSense::AtLeast, Rational(1) - h.value()};
}

std::optional<Lottery> lp_feasible_voting(int m, std::span<const VotingBound> bounds) {
  if (m < 1) throw std::invalid_argument("need at least one alternative");
  lp::Program prog;
  prog.variables = m;
  lp::Constraint total{{}, lp::Relation::Equal, Rational(1)};
  for (int o = 0; o < m; ++o) total.terms.push_back({o, Rational(1)});
  prog.constraints.push_back(std::move(total));
  bool strict = false;
  for (const auto& b : bounds) {
    if (b.pref.size() != m) throw std::invalid_argument("voting bound preference has wrong size");
    if (b.length < 1 || b.length > m) throw std::invalid_argument("voting bound prefix length out of range");
    std::vector<int> cells;
    for (int r = 1; r <= b.length; ++r) cells.push_back(b.pref.at_rank(r));
    add_mass_constraint(prog, cells, b.sense, b.bound, m);
    strict = strict || is_strict(b.sense);
  }
  auto values = solve_with_strictness(std::move(prog), m, strict);
  if (!values) return std::nullopt;
  Lottery out(std::move(*values));
  for (const auto& b : bounds) {
    Rational mass;
    for (int r = 1; r <= b.length; ++r) mass += out[b.pref.at_rank(r)];
    if (!holds(mass, b.sense, b.bound)) throw std::logic_error("voting witness failed re-substitution");
  }
  return out;
}

}  // namespace qsc
