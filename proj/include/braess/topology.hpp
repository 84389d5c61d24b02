#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "braess/game.hpp"
#include "braess/rational.hpp"

namespace braess {

struct PathSet {
  std::vector<EdgePath> paths;  // simple s-t paths, lexicographic by edge-id sequence
};

inline constexpr std::size_t kDefaultMaxPaths = 1000000;
inline constexpr int kDefaultCutNodeBound = 24;

// All simple s-t paths in deterministic lexicographic order. Capacity error
// when the count would exceed max_paths.
PathSet enumerate_paths(const RoutingInstance& instance,
                        std::size_t max_paths = kDefaultMaxPaths);

// Forward edge sets of every vertex bipartition (S, V\S) with s in S and
// t not in S, deduplicated, sorted by (size, lexicographic edge ids).
// Capacity error when the node count exceeds the bound.
std::vector<std::vector<std::string>> enumerate_st_cuts(
    const RoutingInstance& instance, int node_bound = kDefaultCutNodeBound);

// Exact rational max-flow value under the given finite capacities
// (edges absent from the map carry capacity 0).
Rational max_flow(const RoutingInstance& instance,
                  const std::map<std::string, Rational>& capacities);

// Max-flow that also reports per-edge flows.
struct MaxFlowResult {
  Rational value;
  std::map<std::string, Rational> edge_flow;
};
MaxFlowResult max_flow_with_witness(const RoutingInstance& instance,
                                    const std::map<std::string, Rational>& capacities);

// Series-parallel decomposition tree. Leaves are edges; internal nodes are
// series/parallel compositions with their terminals.
struct SPNode {
  enum class Kind { Leaf, Series, Parallel };
  Kind kind = Kind::Leaf;
  std::string edge_id;  // leaves only
  std::string s, t;     // terminals of the composed subnetwork
  std::vector<std::shared_ptr<SPNode>> children;
};

struct SPDecomposition {
  std::shared_ptr<SPNode> root;
};

// Decomposition tree when the s-t network is series-parallel (recognition by
// iterative series/parallel reductions), nullopt otherwise.
std::optional<SPDecomposition> series_parallel_decompose(const RoutingInstance& instance);

// --- flow decomposition helpers (shared by equilibrium and constructions) ---

// Splits conserving edge loads of total throughput `value` into simple s-t
// paths plus leftover circulation mass that cannot be expressed on paths;
// leftover cycles are dropped. Deterministic (edges scanned in id order).
struct PathDecomposition {
  std::vector<std::pair<EdgePath, Rational>> paths;
  bool dropped_cycles = false;
};
PathDecomposition decompose_edge_flow(const RoutingInstance& instance,
                                      std::map<std::string, Rational> edge_flow);

}  // namespace braess
