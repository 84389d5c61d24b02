#pragma once

#include <optional>
#include <vector>

#include "braess/rational.hpp"

namespace braess::detail {

// Exact rational augmenting-path max-flow (Edmonds-Karp). Deterministic:
// arcs are explored in insertion order.
class ResidualNetwork {
 public:
  explicit ResidualNetwork(int num_nodes);

  // Returns the arc handle; the paired reverse arc is handle ^ 1.
  int add_arc(int tail, int head, const Rational& capacity);

  Rational run_max_flow(int source, int sink);

  Rational flow_on(int handle) const;        // flow pushed through a forward arc
  Rational residual_cap(int handle) const;
  // Nodes reachable from `start` through strictly positive residual capacity.
  std::vector<char> reachable(int start) const;

  int num_nodes() const { return static_cast<int>(adjacency_.size()); }

 private:
  struct Arc {
    int to;
    Rational cap;
  };
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<Rational> initial_cap_;
};

// Per-arc lower/upper bounded s-t flow problems on small dense instances;
// the engine under the per-cut worst-equilibrium solves and the
// lexicographic water-filling stages.
struct BoundedArc {
  int tail = -1;
  int head = -1;
  Rational lower = 0;
  Rational upper = 0;
};

struct BoundedFlowSolution {
  std::vector<Rational> arc_flow;
  Rational value = 0;  // net s -> t throughput
};

// Any feasible flow respecting the bounds, with unconstrained value.
std::optional<BoundedFlowSolution> feasible_flow(int num_nodes,
                                                 const std::vector<BoundedArc>& arcs,
                                                 int source, int sink);

// Feasible flow of minimum value.
std::optional<BoundedFlowSolution> min_value_flow(int num_nodes,
                                                  const std::vector<BoundedArc>& arcs,
                                                  int source, int sink);

// Feasible flow whose value is exactly `value`.
std::optional<BoundedFlowSolution> fixed_value_flow(int num_nodes,
                                                    const std::vector<BoundedArc>& arcs,
                                                    int source, int sink,
                                                    const Rational& value);

// fixed_value_flow plus, on infeasibility, the violated cut constraint:
// sum of uppers over `deficient_arcs` must reach `needed` for feasibility.
struct FixedValueOutcome {
  std::optional<BoundedFlowSolution> solution;
  std::vector<int> deficient_arcs;
  Rational needed = 0;
};
FixedValueOutcome fixed_value_flow_cut(int num_nodes, const std::vector<BoundedArc>& arcs,
                                       int source, int sink, const Rational& value);

// Marks each arc whose flow is identical in every feasible flow of the same
// value (no value-preserving augmenting cycle can move it).
std::vector<bool> invariant_arcs(int num_nodes, const std::vector<BoundedArc>& arcs,
                                 const BoundedFlowSolution& solution);

// Cancels circulation on cycles where every arc stays strictly above its
// lower bound, reducing total load without changing value or feasibility.
void cancel_slack_cycles(int num_nodes, const std::vector<BoundedArc>& arcs,
                         BoundedFlowSolution& solution);

}  // namespace braess::detail
