#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "braess/game.hpp"
#include "braess/rational.hpp"

namespace braess {

// Certificate for the Nash cut characterization: a Nash verdict comes with
// the set of edges at latency >= B(f), whose removal disconnects s from t;
// a rejection comes with a cheaper s-t path.
struct NashCertificate {
  bool verdict = false;
  std::optional<std::vector<std::string>> blocking_cut;
  std::optional<EdgePath> violation;
};

struct OptimalResult {
  Rational cost;  // B*(G)
  Flow witness;   // feasible flow with B(witness) = cost (also a Nash flow)
  bool exact = true;  // false when located by bisection (general-monotone)
};

struct WorstNashResult {
  Flow flow;
  Rational cost;                  // B(G, r)
  std::vector<std::string> cut;   // edges achieving the equilibrium bottleneck
  bool exhaustive = true;         // all vertex-bipartition cuts enumerated
};

struct SubpathLabels {
  std::map<std::string, Rational> labels;  // b_f(u) for s-reachable vertices
};

// Minimum bottleneck cost over feasible flows, with witness. Exact rational
// for linear (and affine) latencies; bisection to 1e-9 when a
// general-monotone latency is present.
OptimalResult optimal_bottleneck_cost(const InstancePtr& instance);

// Verdict true iff every used path attains B(f) and the sub-network of edges
// with latency < B(f) has no s-t path.
NashCertificate is_nash_flow(const Flow& flow);

// Exact worst equilibrium bottleneck cost for strictly increasing linear
// latencies: enumerate vertex-bipartition cuts, solve per cut for the
// maximum-B saturated flow, decompose, re-verify, and keep the best verified
// candidate (ties broken by lexicographically smallest cut).
WorstNashResult worst_nash_flow(const InstancePtr& instance);

// A Nash flow that is subpath-optimal: along every used path, every prefix
// attains the minimum s-u bottleneck b_f(u). Its cost equals B*(G).
struct SubpathOptimalResult {
  Flow flow;
  SubpathLabels labels;
};
SubpathOptimalResult subpath_optimal_nash_flow(const InstancePtr& instance);

// rho(G) = B(G) / B*(G); linear latencies only.
Rational price_of_anarchy(const InstancePtr& instance);

// Minimum s-u bottleneck labels under the loads of `flow`, for every vertex
// reachable from s. labels[s] = 0.
SubpathLabels min_bottleneck_labels(const Flow& flow);

}  // namespace braess
