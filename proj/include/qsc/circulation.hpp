#pragma once

#include <cstdint>
#include <optional>
#include <vector>

/// Feasible circulations with integer lower and upper edge bounds.
///
/// Reduction: subtract lower bounds, route the induced node imbalances from a
/// super source to a super sink, and run max flow (Dinic). A circulation
/// exists iff the auxiliary max flow saturates every super-source edge.
namespace qsc::flow {

using Capacity = std::int64_t;

struct Edge {
  int from;
  int to;
  Capacity lower;
  Capacity upper;
};

class CirculationProblem {
 public:
  int add_node();
  int add_edge(int from, int to, Capacity lower, Capacity upper);

  int node_count() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Any feasible circulation (flow per edge, indexed like edges()).
  std::optional<std::vector<Capacity>> solve() const;

  /// A feasible circulation whose flow on `edge` is strictly above its lower
  /// bound (raise = true) or strictly below its upper bound (raise = false).
  std::optional<std::vector<Capacity>> solve_with_slack(int edge, bool raise) const;

  /// Exact check of bounds and conservation.
  bool is_feasible(const std::vector<Capacity>& flow) const;

 private:
  int nodes_ = 0;
  std::vector<Edge> edges_;
};

}  // namespace qsc::flow
