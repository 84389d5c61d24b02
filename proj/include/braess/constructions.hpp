#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "braess/game.hpp"
#include "braess/rational.hpp"

namespace braess {

// 2-Directed-Disjoint-Paths input: directed graph D with terminals
// s1, s2, t1, t2, promised to contain edge-disjoint s1->t2 and s2->t1 paths.
struct DirectedGraph {
  std::vector<std::string> nodes;
  std::vector<std::tuple<std::string, std::string, std::string>> edges;  // (id, tail, head)
};

struct TwoDDPInstance {
  DirectedGraph network;
  std::string s1, s2, t1, t2;
  // The promised edge-disjoint pair, found at construction.
  std::vector<std::string> cross_path_s1_t2;  // edge ids
  std::vector<std::string> cross_path_s2_t1;
};

inline constexpr int kDefault2DDPNodeBound = 16;

// Validates terminals and the edge-disjoint cross-path promise.
TwoDDPInstance make_2ddp(DirectedGraph network, const std::string& s1,
                         const std::string& s2, const std::string& t1,
                         const std::string& t2);

struct TwoDDPVerdict {
  bool yes = false;
  std::vector<std::string> path_s1_t1;  // witness edge ids (YES only)
  std::vector<std::string> path_s2_t2;
};

// Exhaustive vertex-disjoint-paths decision (NP-hard in general; brute force
// within the node bound).
TwoDDPVerdict classify_2ddp(const TwoDDPInstance& d, int node_bound = kDefault2DDPNodeBound);

// Good subnetwork predicate on a subset of D's edges: (i) s1 and s2 each
// reach t1 or t2, (ii) t1 and t2 are each reached, (iii) the s1-t2 or the
// s2-t1 connection is absent.
bool is_good_subnetwork(const TwoDDPInstance& d, const std::vector<std::string>& edge_ids);

// A gap network: routing instance plus the gap bookkeeping. For every rate r
// the instance has B*(G) = r / gamma1; bad subnetworks have worst equilibrium
// cost >= r / gamma2.
struct GapNetwork {
  InstancePtr instance;
  Rational gamma1, gamma2;
  int level = 0;
  Rational eps;
  std::map<std::string, std::string> external_edges;  // e1..e9 -> edge id or edgework prefix
  std::vector<DCopyRef> d_copies;
  // Level >= 1: the eight embedded gap copies keyed by external-edge index
  // (1, 3, 4, ..., 9), ids/nodes renamed into the host instance. Copies for
  // e1/e3 already carry the halved latencies.
  std::vector<std::pair<int, std::shared_ptr<GapNetwork>>> edgeworks;
};

// Level-0 gadget of the 2DDP reduction: 4 fresh vertices, 9 external edges,
// latencies x/2 on e1/e3, x on e4..e9, eps*x on e2 and all D edges.
// Requires eps in (0, 1/4).
GapNetwork build_gap_network(const TwoDDPInstance& d, const Rational& eps,
                             const Rational& rate = 1);

// One amplification round: external edges except e2 replaced by copies of
// `gap` (latencies halved inside the e1/e3 copies), fresh copy of D, new
// gamma1 = 4*gamma1, gamma2 = 3*gamma2. Requires eps in (0, 1/(4*gamma1)).
GapNetwork amplify_gap(const TwoDDPInstance& d, const GapNetwork& gap, const Rational& eps);

// Rate x with B(subedgework, x) = target_cost, by homogeneity of linear
// latencies: x = target_cost / B(subedgework, 1).
Rational saturation_rate(const InstancePtr& subedgework, const Rational& target_cost);

enum class WitnessRole { Optimal, GoodEquilibrium, BadEquilibrium };

struct WitnessFlow {
  WitnessRole role;
  Flow flow;                               // on the full gadget instance
  std::vector<std::string> subnetwork;     // edge set it certifies (Nash there)
  Rational expected_cost;
};

// The explicit flows from the gadget analysis, each tagged with the
// subnetwork on which it is a Nash flow of the stated cost:
//   Optimal          r/4-r/4-r/2 routing, cost r/gamma1, on the full network
//   GoodEquilibrium  cost r/gamma1 on the good subnetwork (YES instances)
//   BadEquilibrium   r/3-per-route flow, cost r/gamma2, on the full network
std::vector<WitnessFlow> build_witness_flows(const TwoDDPInstance& d, const GapNetwork& gap,
                                             const Rational& r);

// Edge set of the good subnetwork (YES instances only): all external
// edgeworks' good subedgeworks plus the vertex-disjoint D paths.
std::optional<std::vector<std::string>> good_subnetwork_edges(const TwoDDPInstance& d,
                                                              const GapNetwork& gap);

// Scans the embedded D copies of `instance` restricted to `edge_ids` for a
// good subnetwork; requires gadget metadata.
bool contains_good_d_copy(const TwoDDPInstance& d, const RoutingInstance& instance,
                          const std::vector<std::string>& edge_ids);

}  // namespace braess
