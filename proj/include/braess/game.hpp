#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "braess/rational.hpp"

namespace braess {

enum class LatencyKind { Linear, Affine, GeneralMonotone };

// A continuous non-decreasing per-edge latency function.
//   Linear:          c(x) = a*x, a > 0
//   Affine:          c(x) = a*x + b, a, b >= 0
//   GeneralMonotone: non-decreasing piecewise-linear table over [0, domain]
// Evaluation is exact rational for all three kinds; the numeric tolerance
// documented for general-monotone latencies applies to solver-side searches
// over the cost axis, not to point evaluation.
struct LatencyFunction {
  LatencyKind kind = LatencyKind::Linear;
  Rational a = 0;   // slope (cost per unit flow)
  Rational b = 0;   // intercept (cost units)
  Rational xi = 0;  // Lipschitz constant
  // GeneralMonotone only: (load, cost) breakpoints, strictly increasing loads,
  // non-decreasing costs, first load = 0.
  std::vector<std::pair<Rational, Rational>> table;

  static LatencyFunction linear(const Rational& slope);
  static LatencyFunction affine(const Rational& slope, const Rational& intercept);
  static LatencyFunction monotone(std::vector<std::pair<Rational, Rational>> table,
                                  const Rational& xi);

  // Exact latency at load x. Domain error outside [0, domain_max()] for
  // general-monotone latencies; linear/affine accept any x >= 0.
  Rational eval(const Rational& x) const;

  // Largest load with cost <= lambda, clamped to `clamp` (a load never
  // exceeds the traffic rate, so clamping at the rate is lossless).
  // Zero when even eval(0) > lambda.
  Rational inverse_cap(const Rational& lambda, const Rational& clamp) const;

  // Upper end of the valid load domain for general-monotone tables.
  Rational domain_max() const;

  LatencyFunction scaled(const Rational& alpha) const;           // alpha * c(x)
  LatencyFunction rate_compressed(const Rational& rate) const;   // c(rate * x)

  bool strictly_increasing_linear() const {
    return kind == LatencyKind::Linear && a > 0;
  }
};

struct EdgeDef {
  std::string id;
  int tail = -1;
  int head = -1;
  LatencyFunction latency;
};

// Gadget provenance carried by generated instances (see constructions.hpp).
struct DCopyRef {
  std::string prefix;        // hierarchical prefix of this embedded copy of D
  std::string s1, s2, t1, t2;  // node ids inside the host instance
  std::vector<std::string> edge_ids;
};

struct GadgetMetadata {
  Rational gamma1, gamma2;
  int level = 0;
  Rational eps;
  std::map<std::string, std::string> external_edges;  // "e1".."e9" -> edge id or edgework prefix
  std::vector<DCopyRef> d_copies;
};

// Immutable single-commodity routing instance: directed network, per-edge
// latency functions, and a traffic rate entering at `source` and leaving at
// `sink`. Construct through make_instance, which validates the invariants.
struct RoutingInstance {
  std::vector<std::string> nodes;
  int source = -1;
  int sink = -1;
  std::vector<EdgeDef> edges;
  Rational rate = 1;
  std::optional<GadgetMetadata> gadget;

  // derived adjacency, filled by make_instance
  std::vector<std::vector<int>> out_edges;
  std::vector<std::vector<int>> in_edges;

  int node_index(const std::string& name) const;  // -1 if absent
  int edge_index(const std::string& id) const;    // -1 if absent
  const EdgeDef& edge(const std::string& id) const;
};

using InstancePtr = std::shared_ptr<const RoutingInstance>;

// Validates and freezes an instance: s != t, unique edge ids, no self-loops,
// resolvable endpoints, positive rate, at least one s-t path.
InstancePtr make_instance(std::vector<std::string> nodes, const std::string& source,
                          const std::string& sink, std::vector<EdgeDef> edges,
                          const Rational& rate,
                          std::optional<GadgetMetadata> gadget = std::nullopt);

// Restriction of `base` to the given edge ids (same nodes, same terminals).
// nullptr when the restriction has no s-t path.
InstancePtr subnetwork(const InstancePtr& base, const std::vector<std::string>& edge_ids);

// True iff the subgraph on `edge_ids` has an s-t path.
bool has_st_path(const RoutingInstance& instance, const std::vector<std::string>& edge_ids);

using EdgePath = std::vector<std::string>;  // ordered edge-id sequence

// Path-indexed flow over simple s-t paths of one instance; edge loads are
// always derived. Canonical form: positive amounts, paths deduplicated and
// sorted lexicographically by edge-id sequence, amounts summing to the rate.
struct Flow {
  InstancePtr instance;
  std::vector<std::pair<EdgePath, Rational>> path_flows;
};

// Validates feasibility (each path a simple s-t path, amounts >= 0, total
// exactly the rate) and canonicalizes. Feasibility error otherwise.
Flow make_flow(const InstancePtr& instance,
               std::vector<std::pair<EdgePath, Rational>> path_flows);

struct CostReport {
  std::map<std::string, Rational> edge_latencies;              // every edge
  std::vector<std::pair<EdgePath, Rational>> path_bottlenecks;  // support paths
  Rational bottleneck = 0;                                      // B(f)
};

// f_e for every edge id (0 on edges carried by no used path).
std::map<std::string, Rational> edge_loads(const Flow& flow);

// Exact per-edge latencies, per-used-path bottlenecks, and B(f).
CostReport bottleneck_cost(const Flow& flow);

// Every latency replaced by alpha * c_e(x); alpha > 0.
InstancePtr scale_latencies(const InstancePtr& instance, const Rational& alpha);

// Equivalent instance with rate 1 (latencies c_e(r*x)); flows correspond
// under f_p -> f_p / r.
InstancePtr normalize_rate(const InstancePtr& instance);

// True iff no used path exceeds any simple s-t path's bottleneck by more
// than eps, checked over the full path universe of the instance.
bool is_eps_nash(const Flow& flow, const Rational& eps);

// Shared helper: bottleneck of an edge-id path under given edge costs.
Rational path_bottleneck(const RoutingInstance& instance, const EdgePath& path,
                         const std::map<std::string, Rational>& edge_cost);

}  // namespace braess
