#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "braess/game.hpp"
#include "braess/rational.hpp"
#include "braess/topology.hpp"

namespace braess {

enum class LogBase { Natural, Two };

// k(eps) = floor(log(2m) / (2 eps^2)) + 1. Natural log by default; the floor
// is evaluated with directed rounding so it is exact.
int k_of_eps(const Rational& eps, int num_edges, LogBase base = LogBase::Natural);

// Sparse flow induced by a multiset of paths: g_p = count(p) / size.
struct CandidateFlow {
  std::vector<std::pair<EdgePath, int>> multiset;  // path -> multiplicity
  int size = 0;                                    // |P| = sum of counts
  Flow flow;                                       // derived rate-1 flow
};

inline constexpr std::uint64_t kDefaultCandidateBound = 20000000;

// Every multiset of size 1..k over the path universe, streamed in
// (size, lexicographic) order. Capacity error when the total count exceeds
// the bound.
void enumerate_candidate_flows(const InstancePtr& instance, const PathSet& paths, int k,
                               const std::function<void(const CandidateFlow&)>& emit,
                               std::uint64_t candidate_bound = kDefaultCandidateBound);
std::uint64_t count_candidate_flows(std::size_t num_paths, int k);

// Approximates `flow` (rate 1) by a candidate flow on at most
// k(eps, m) paths from its support, with per-edge deviation <= eps on used
// edges and 0 elsewhere. Repeated proportional sampling, each sample checked
// exactly; search-failure error with the best deviation found if the attempt
// budget (10*k*m) is exhausted.
CandidateFlow sparsify_flow(const Flow& flow, const Rational& eps,
                            std::uint64_t seed = 0, LogBase base = LogBase::Natural);

struct ApproxParams {
  Rational eps;
  Rational delta;
  Rational xi;
  Rational eps1;  // min{delta, eps/(4 xi)}
  Rational eps2;  // eps / 2
  int k = 0;      // k(eps1, m)
};
ApproxParams make_approx_params(const Rational& eps, const Rational& delta,
                                const Rational& xi, int num_edges,
                                LogBase base = LogBase::Natural);

enum class ParadoxClass { ParadoxFree, ParadoxRidden, Intermediate };
std::string to_string(ParadoxClass c);

struct SubnetworkReport {
  std::vector<std::string> subnetwork;  // edge ids of H
  Rational worst_cost;                  // B(H, r), or B~(H) for the approximation
  Flow witness;
  std::optional<ParadoxClass> classification;
  std::optional<Rational> improvement;  // B(G, r) / min_H B(H, r)
  std::uint64_t enumerated = 0;         // subnetworks or candidate flows visited
};

inline constexpr int kDefaultSubnetEdgeBound = 16;

// Exact minimizer of B(H, r) over all edge subsets containing an s-t path
// (ties: smallest edge set, then lexicographic). Linear latencies, m within
// the bound.
SubnetworkReport exhaustive_best_subnetwork(const InstancePtr& instance,
                                            int edge_bound = kDefaultSubnetEdgeBound);

// exhaustive_best_subnetwork plus classification and improvement ratio.
SubnetworkReport classify_paradox(const InstancePtr& instance,
                                  int edge_bound = kDefaultSubnetEdgeBound);

struct ApproxResult {
  std::vector<std::string> subnetwork;
  Flow flow;  // eps/2-Nash flow in the subnetwork
  Rational candidate_cost;  // B~(H) = B(flow)
  SubnetworkReport report;
};

// Candidate-enumeration approximation: generate all candidate flows at
// sparsity k(eps1), pair them with candidate subnetworks, keep eps2-Nash
// pairs, and return argmin_H of B~(H) = max B(g) over candidate solutions on
// H. Requires rate 1. Infeasibility error when no candidate solution exists.
ApproxResult approx_best_subnetwork(const InstancePtr& instance, const ApproxParams& params,
                                    std::size_t max_paths = kDefaultMaxPaths,
                                    std::uint64_t candidate_bound = kDefaultCandidateBound);

}  // namespace braess
