#include "qsc/circulation.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace qsc::flow {

namespace {

class Dinic {
 public:
  explicit Dinic(int n) : adj_(static_cast<std::size_t>(n)), level_(static_cast<std::size_t>(n)), it_(static_cast<std::size_t>(n)) {}

  int add_arc(int u, int v, Capacity cap) {
    arcs_.push_back({v, cap});
    adj_[static_cast<std::size_t>(u)].push_back(static_cast<int>(arcs_.size()) - 1);
    arcs_.push_back({u, 0});
    adj_[static_cast<std::size_t>(v)].push_back(static_cast<int>(arcs_.size()) - 1);
    return static_cast<int>(arcs_.size()) - 2;
  }

  Capacity flow_on(int arc) const { return arcs_[static_cast<std::size_t>(arc ^ 1)].residual; }

  Capacity max_flow(int s, int t) {
    Capacity total = 0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), 0);
      while (Capacity pushed = dfs(s, t, std::numeric_limits<Capacity>::max())) total += pushed;
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    Capacity residual;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int a : adj_[static_cast<std::size_t>(u)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.residual > 0 && level_[static_cast<std::size_t>(arc.to)] < 0) {
          level_[static_cast<std::size_t>(arc.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(arc.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  Capacity dfs(int u, int t, Capacity limit) {
    if (u == t) return limit;
    auto& idx = it_[static_cast<std::size_t>(u)];
    const auto& out = adj_[static_cast<std::size_t>(u)];
    for (; idx < out.size(); ++idx) {
      const int a = out[idx];
      Arc& arc = arcs_[static_cast<std::size_t>(a)];
      if (arc.residual <= 0 || level_[static_cast<std::size_t>(arc.to)] != level_[static_cast<std::size_t>(u)] + 1) continue;
      if (Capacity pushed = dfs(arc.to, t, std::min(limit, arc.residual))) {
        arc.residual -= pushed;
        arcs_[static_cast<std::size_t>(a ^ 1)].residual += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace

int CirculationProblem::add_node() { return nodes_++; }

int CirculationProblem::add_edge(int from, int to, Capacity lower, Capacity upper) {
  if (from < 0 || from >= nodes_ || to < 0 || to >= nodes_) throw std::out_of_range("edge endpoint out of range");
  if (lower < 0) throw std::invalid_argument("negative lower bound");
  edges_.push_back({from, to, lower, upper});
  return static_cast<int>(edges_.size()) - 1;
}

std::optional<std::vector<Capacity>> CirculationProblem::solve() const {
  std::vector<Capacity> excess(static_cast<std::size_t>(nodes_), 0);
  for (const auto& e : edges_) {
    if (e.lower > e.upper) return std::nullopt;
    excess[static_cast<std::size_t>(e.to)] += e.lower;
    excess[static_cast<std::size_t>(e.from)] -= e.lower;
  }
  const int source = nodes_;
  const int sink = nodes_ + 1;
  Dinic dinic(nodes_ + 2);
  std::vector<int> arc_of(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    arc_of[k] = dinic.add_arc(edges_[k].from, edges_[k].to, edges_[k].upper - edges_[k].lower);
  }
  Capacity demand = 0;
  for (int v = 0; v < nodes_; ++v) {
    const Capacity ex = excess[static_cast<std::size_t>(v)];
    if (ex > 0) {
      dinic.add_arc(source, v, ex);
      demand += ex;
    } else if (ex < 0) {
      dinic.add_arc(v, sink, -ex);
    }
  }
  if (dinic.max_flow(source, sink) != demand) return std::nullopt;
  std::vector<Capacity> flow(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) flow[k] = edges_[k].lower + dinic.flow_on(arc_of[k]);
  return flow;
}

std::optional<std::vector<Capacity>> CirculationProblem::solve_with_slack(int edge, bool raise) const {
  auto flow = solve();
  if (!flow) return std::nullopt;
  const Edge& target = edges_.at(static_cast<std::size_t>(edge));
  auto& fe = (*flow)[static_cast<std::size_t>(edge)];
  if (raise ? fe > target.lower : fe < target.upper) return flow;
  if (target.lower == target.upper) return std::nullopt;

  // Look for a residual path that closes a cycle through `edge` in the
  // required direction; raising needs to(e) ~> from(e), lowering the reverse.
  const int start = raise ? target.to : target.from;
  const int goal = raise ? target.from : target.to;
  struct Step {
    int edge;
    bool forward;
  };
  std::vector<std::optional<Step>> parent(static_cast<std::size_t>(nodes_));
  std::vector<bool> seen(static_cast<std::size_t>(nodes_), false);
  std::vector<std::vector<Step>> residual(static_cast<std::size_t>(nodes_));
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (static_cast<int>(k) == edge) continue;
    const Edge& e = edges_[k];
    if ((*flow)[k] < e.upper) residual[static_cast<std::size_t>(e.from)].push_back({static_cast<int>(k), true});
    if ((*flow)[k] > e.lower) residual[static_cast<std::size_t>(e.to)].push_back({static_cast<int>(k), false});
  }
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = true;
  while (!q.empty() && !seen[static_cast<std::size_t>(goal)]) {
    const int u = q.front();
    q.pop();
    for (const Step& s : residual[static_cast<std::size_t>(u)]) {
      const Edge& e = edges_[static_cast<std::size_t>(s.edge)];
      const int v = s.forward ? e.to : e.from;
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      parent[static_cast<std::size_t>(v)] = s;
      q.push(v);
    }
  }
  if (!seen[static_cast<std::size_t>(goal)]) return std::nullopt;

  Capacity delta = raise ? target.upper - fe : fe - target.lower;
  for (int v = goal; v != start;) {
    const Step s = *parent[static_cast<std::size_t>(v)];
    const Edge& e = edges_[static_cast<std::size_t>(s.edge)];
    const Capacity f = (*flow)[static_cast<std::size_t>(s.edge)];
    delta = std::min(delta, s.forward ? e.upper - f : f - e.lower);
    v = s.forward ? e.from : e.to;
  }
  fe += raise ? delta : -delta;
  for (int v = goal; v != start;) {
    const Step s = *parent[static_cast<std::size_t>(v)];
    const Edge& e = edges_[static_cast<std::size_t>(s.edge)];
    (*flow)[static_cast<std::size_t>(s.edge)] += s.forward ? delta : -delta;
    v = s.forward ? e.from : e.to;
  }
  return flow;
}

bool CirculationProblem::is_feasible(const std::vector<Capacity>& flow) const {
  if (flow.size() != edges_.size()) return false;
  std::vector<Capacity> balance(static_cast<std::size_t>(nodes_), 0);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    if (flow[k] < edges_[k].lower || flow[k] > edges_[k].upper) return false;
    balance[static_cast<std::size_t>(edges_[k].from)] -= flow[k];
    balance[static_cast<std::size_t>(edges_[k].to)] += flow[k];
  }
  return std::all_of(balance.begin(), balance.end(), [](Capacity b) { return b == 0; });
}

}  // namespace qsc::flow
