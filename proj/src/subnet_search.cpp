#include "braess/subnet_search.hpp"

#include <mpfr.h>

#include <algorithm>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"

namespace braess {

int k_of_eps(const Rational& eps, int num_edges, LogBase base) {
  if (eps <= 0) fail(ErrorKind::Domain, "eps must be positive");
  if (num_edges <= 0) fail(ErrorKind::Domain, "edge count must be positive");
  Rational denom = 2 * eps * eps;
  // floor(log(2m) / (2 eps^2)) with directed rounding; raise precision until
  // the floors under both rounding directions agree.
  for (mpfr_prec_t prec = 128; prec <= 2048; prec *= 2) {
    mpfr_t lo, hi;
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    mpfr_set_ui(lo, 2 * static_cast<unsigned long>(num_edges), MPFR_RNDD);
    mpfr_set_ui(hi, 2 * static_cast<unsigned long>(num_edges), MPFR_RNDU);
    if (base == LogBase::Natural) {
      mpfr_log(lo, lo, MPFR_RNDD);
      mpfr_log(hi, hi, MPFR_RNDU);
    } else {
      mpfr_log2(lo, lo, MPFR_RNDD);
      mpfr_log2(hi, hi, MPFR_RNDU);
    }
    mpfr_div_q(lo, lo, denom.get_mpq_t(), MPFR_RNDD);
    mpfr_div_q(hi, hi, denom.get_mpq_t(), MPFR_RNDU);
    mpfr_floor(lo, lo);
    mpfr_floor(hi, hi);
    long floor_lo = mpfr_get_si(lo, MPFR_RNDN);
    long floor_hi = mpfr_get_si(hi, MPFR_RNDN);
    mpfr_clear(lo);
    mpfr_clear(hi);
    if (floor_lo == floor_hi) return static_cast<int>(floor_lo) + 1;
  }
  fail(ErrorKind::Internal, "k(eps) floor undecidable at 2048 bits");
}

// ---------------------------------------------------------------------------
// candidate flow enumeration
// ---------------------------------------------------------------------------

std::uint64_t count_candidate_flows(std::size_t num_paths, int k) {
  mpz_class total = 0;
  for (int j = 1; j <= k; ++j) {
    mpz_class binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(num_paths) + j - 1,
                 static_cast<unsigned long>(j));
    total += binom;
  }
  if (!total.fits_ulong_p()) return std::numeric_limits<std::uint64_t>::max();
  return total.get_ui();
}

namespace {

// Multisets over [0, num_paths) of size 1..k, in (size, lexicographic) order.
// counts[i] is the multiplicity of path i.
void enumerate_multisets(std::size_t num_paths, int k,
                         const std::function<void(const std::vector<int>&, int)>& emit) {
  std::vector<int> counts(num_paths, 0);
  std::function<void(std::size_t, int, int)> rec = [&](std::size_t from, int remaining,
                                                       int size) {
    if (remaining == 0) {
      emit(counts, size);
      return;
    }
    if (from >= num_paths) return;
    for (int take = remaining; take >= 0; --take) {
      counts[from] = take;
      rec(from + 1, remaining - take, size);
    }
    counts[from] = 0;
  };
  for (int size = 1; size <= k; ++size) rec(0, size, size);
}

}  // namespace

void enumerate_candidate_flows(const InstancePtr& instance, const PathSet& paths, int k,
                               const std::function<void(const CandidateFlow&)>& emit,
                               std::uint64_t candidate_bound) {
  if (instance->rate != 1)
    fail(ErrorKind::Domain, "candidate flows are defined for rate-1 instances");
  std::uint64_t total = count_candidate_flows(paths.paths.size(), k);
  if (total > candidate_bound)
    fail(ErrorKind::Capacity, "candidate enumeration would visit " + std::to_string(total) +
                                  " multisets, bound is " + std::to_string(candidate_bound));
  enumerate_multisets(paths.paths.size(), k, [&](const std::vector<int>& counts, int size) {
    CandidateFlow cf;
    cf.size = size;
    std::vector<std::pair<EdgePath, Rational>> amounts;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i] == 0) continue;
      cf.multiset.emplace_back(paths.paths[i], counts[i]);
      amounts.emplace_back(paths.paths[i], rat(counts[i], size));
    }
    cf.flow = make_flow(instance, std::move(amounts));
    emit(cf);
  });
}

// ---------------------------------------------------------------------------
// sparsification
// ---------------------------------------------------------------------------

namespace {

// Wait-free exact check of the per-edge deviation bound.
bool deviation_ok(const Flow& original, const std::map<std::string, Rational>& orig_loads,
                  const std::map<std::string, Rational>& sparse_loads, const Rational& eps,
                  Rational* worst) {
  bool ok = true;
  for (const auto& e : original.instance->edges) {
    const Rational& f = orig_loads.at(e.id);
    const Rational& g = sparse_loads.at(e.id);
    if (f == 0) {
      if (g != 0) ok = false;
      continue;
    }
    Rational dev = g > f ? g - f : f - g;
    if (worst && dev > *worst) *worst = dev;
    if (dev > eps) ok = false;
  }
  return ok;
}

}  // namespace

CandidateFlow sparsify_flow(const Flow& flow, const Rational& eps, std::uint64_t seed,
                            LogBase base) {
  if (flow.instance->rate != 1)
    fail(ErrorKind::Domain, "sparsification expects a rate-normalized instance");
  if (eps <= 0) fail(ErrorKind::Domain, "eps must be positive");
  int m = static_cast<int>(flow.instance->edges.size());
  int k = k_of_eps(eps, m, base);
  auto orig_loads = edge_loads(flow);

  auto finish = [&](std::vector<std::pair<EdgePath, int>> multiset, int size) {
    CandidateFlow cf;
    cf.multiset = std::move(multiset);
    cf.size = size;
    std::vector<std::pair<EdgePath, Rational>> amounts;
    for (const auto& [path, count] : cf.multiset) amounts.emplace_back(path, rat(count, size));
    cf.flow = make_flow(flow.instance, std::move(amounts));
    return cf;
  };

  // exact representation within the budget: nothing to sample
  mpz_class common_den = 1;
  for (const auto& [path, amount] : flow.path_flows)
    mpz_lcm(common_den.get_mpz_t(), common_den.get_mpz_t(), amount.get_den().get_mpz_t());
  if (common_den.fits_sint_p() && common_den.get_si() <= k) {
    int q = static_cast<int>(common_den.get_si());
    std::vector<std::pair<EdgePath, int>> multiset;
    for (const auto& [path, amount] : flow.path_flows) {
      Rational scaled = amount * q;
      multiset.emplace_back(path, static_cast<int>(scaled.get_num().get_si()));
    }
    return finish(std::move(multiset), q);
  }

  std::mt19937_64 rng(seed);
  const std::uint64_t budget = 10ull * static_cast<std::uint64_t>(k) * m;
  Rational best_deviation = -1;
  mpz_class two64 = mpz_class(1) << 64;
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    std::map<EdgePath, int> counts;
    for (int draw = 0; draw < k; ++draw) {
      Rational target(mpz_class(rng()), two64);
      target.canonicalize();
      Rational cumulative = 0;
      for (const auto& [path, amount] : flow.path_flows) {
        cumulative += amount;
        if (target < cumulative) {
          ++counts[path];
          break;
        }
      }
    }
    std::map<std::string, Rational> sparse_loads;
    for (const auto& e : flow.instance->edges) sparse_loads[e.id] = 0;
    for (const auto& [path, count] : counts)
      for (const auto& id : path) sparse_loads[id] += rat(count, k);
    Rational worst = 0;
    if (deviation_ok(flow, orig_loads, sparse_loads, eps, &worst)) {
      std::vector<std::pair<EdgePath, int>> multiset(counts.begin(), counts.end());
      return finish(std::move(multiset), k);
    }
    if (best_deviation < 0 || worst < best_deviation) best_deviation = worst;
  }
  fail(ErrorKind::SearchFailure,
       "sparsification budget exhausted; best deviation " + rat_str(best_deviation));
}

// ---------------------------------------------------------------------------
// exhaustive best subnetwork
// ---------------------------------------------------------------------------

namespace {

std::string classification_name(ParadoxClass c) {
  switch (c) {
    case ParadoxClass::ParadoxFree:
      return "paradox-free";
    case ParadoxClass::ParadoxRidden:
      return "paradox-ridden";
    case ParadoxClass::Intermediate:
      return "intermediate";
  }
  return "?";
}

}  // namespace

std::string to_string(ParadoxClass c) { return classification_name(c); }

SubnetworkReport exhaustive_best_subnetwork(const InstancePtr& instance, int edge_bound) {
  const RoutingInstance& g = *instance;
  if (g.rate == 0)
    fail(ErrorKind::Domain, "paradox classification undefined at rate 0");
  int m = static_cast<int>(g.edges.size());
  if (m > edge_bound)
    fail(ErrorKind::Capacity, "exhaustive search bound exceeded: " + std::to_string(m) +
                                  " edges > " + std::to_string(edge_bound));
  for (const auto& e : g.edges)
    if (!e.latency.strictly_increasing_linear())
      fail(ErrorKind::UnsupportedModel,
           "exhaustive search requires strictly increasing linear latencies");

  // edge order fixed by id so subset tie-breaks are lexicographic
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return g.edges[a].id < g.edges[b].id; });

  WorstNashResult full = worst_nash_flow(instance);
  OptimalResult opt = optimal_bottleneck_cost(instance);

  // B(H) only depends on the edges of H lying on some s-t path (dead edges
  // carry no flow and latency 0 at load 0), so solve per live core.
  auto core_of = [&](std::uint64_t mask) {
    std::vector<char> from_s(g.nodes.size(), 0), to_t(g.nodes.size(), 0);
    from_s[g.source] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < m; ++i)
        if ((mask >> i) & 1 && from_s[g.edges[i].tail] && !from_s[g.edges[i].head]) {
          from_s[g.edges[i].head] = 1;
          changed = true;
        }
    }
    to_t[g.sink] = 1;
    changed = true;
    while (changed) {
      changed = false;
      for (int i = 0; i < m; ++i)
        if ((mask >> i) & 1 && to_t[g.edges[i].head] && !to_t[g.edges[i].tail]) {
          to_t[g.edges[i].tail] = 1;
          changed = true;
        }
    }
    std::uint64_t core = 0;
    for (int i = 0; i < m; ++i)
      if (((mask >> i) & 1) && from_s[g.edges[i].tail] && to_t[g.edges[i].head]) {
        // keep only edges on a live s-t route
        core |= std::uint64_t{1} << i;
      }
    return core;
  };
  // an edge is on a simple s-t path iff s reaches its tail and its head
  // reaches t within the subnetwork; iterate to a fixed point of liveness
  auto live_core = [&](std::uint64_t mask) {
    std::uint64_t prev = mask;
    while (true) {
      std::uint64_t next = core_of(prev);
      if (next == prev) return next;
      prev = next;
    }
  };

  struct CoreResult {
    Rational cost;
    Flow flow;
  };
  std::map<std::uint64_t, std::optional<CoreResult>> memo;
  std::uint64_t enumerated = 0;

  std::optional<Rational> best_cost;
  std::uint64_t best_mask = 0;
  Flow best_flow;

  auto ids_of = [&](std::uint64_t mask) {
    std::vector<std::string> ids;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) ids.push_back(g.edges[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
    std::uint64_t core = live_core(mask);
    if (core == 0) continue;
    ++enumerated;
    if (core != mask) continue;  // its core is also enumerated and never worse
    auto it = memo.find(core);
    if (it == memo.end()) {
      InstancePtr sub = subnetwork(instance, ids_of(core));
      std::optional<CoreResult> res;
      if (sub) {
        WorstNashResult worst = worst_nash_flow(sub);
        res = CoreResult{worst.cost, worst.flow};
      }
      it = memo.emplace(core, std::move(res)).first;
    }
    if (!it->second) continue;
    const Rational& cost = it->second->cost;
    auto better = [&] {
      if (!best_cost || cost < *best_cost) return true;
      if (cost > *best_cost) return false;
      int pc_new = __builtin_popcountll(core), pc_old = __builtin_popcountll(best_mask);
      if (pc_new != pc_old) return pc_new < pc_old;
      return ids_of(core) < ids_of(best_mask);
    };
    if (better()) {
      best_cost = cost;
      best_mask = core;
      best_flow = it->second->flow;
    }
  }
  if (!best_cost) fail(ErrorKind::Structure, "no subnetwork contains an s-t path");

  SubnetworkReport report;
  report.subnetwork = ids_of(best_mask);
  report.worst_cost = *best_cost;
  report.witness = best_flow;
  report.enumerated = enumerated;
  if (*best_cost == full.cost)
    report.classification = ParadoxClass::ParadoxFree;
  else if (*best_cost == opt.cost)
    report.classification = ParadoxClass::ParadoxRidden;
  else
    report.classification = ParadoxClass::Intermediate;
  report.improvement = full.cost / *best_cost;
  return report;
}

SubnetworkReport classify_paradox(const InstancePtr& instance, int edge_bound) {
  return exhaustive_best_subnetwork(instance, edge_bound);
}

// ---------------------------------------------------------------------------
// candidate-enumeration approximation
// ---------------------------------------------------------------------------

ApproxParams make_approx_params(const Rational& eps, const Rational& delta,
                                const Rational& xi, int num_edges, LogBase base) {
  if (eps <= 0 || delta <= 0 || xi <= 0)
    fail(ErrorKind::Domain, "eps, delta, xi must be positive");
  ApproxParams p;
  p.eps = eps;
  p.delta = delta;
  p.xi = xi;
  p.eps1 = std::min(delta, Rational(eps / (4 * xi)));
  p.eps2 = eps / 2;
  p.k = k_of_eps(p.eps1, num_edges, base);
  return p;
}

ApproxResult approx_best_subnetwork(const InstancePtr& instance, const ApproxParams& params,
                                    std::size_t max_paths, std::uint64_t candidate_bound) {
  const RoutingInstance& g = *instance;
  if (g.rate != 1)
    fail(ErrorKind::Domain, "the approximation expects a rate-normalized instance");
  int m = static_cast<int>(g.edges.size());
  if (m > 64) fail(ErrorKind::Capacity, "approximation limited to 64 edges");
  PathSet paths = enumerate_paths(g, max_paths);
  std::size_t P = paths.paths.size();
  std::uint64_t total = count_candidate_flows(P, params.k);
  if (total > candidate_bound)
    fail(ErrorKind::Capacity, "candidate enumeration would visit " + std::to_string(total) +
                                  " multisets, bound is " + std::to_string(candidate_bound));

  std::vector<std::uint64_t> path_mask(P, 0);
  std::map<std::string, int> edge_pos;
  for (int i = 0; i < m; ++i) edge_pos[g.edges[i].id] = i;
  for (std::size_t p = 0; p < P; ++p)
    for (const auto& id : paths.paths[p]) path_mask[p] |= std::uint64_t{1} << edge_pos.at(id);

  // leaf evaluation: exact loads count/size, exact edge costs, per-path
  // bottlenecks over the whole universe
  std::vector<int> edge_count(m);
  std::vector<Rational> zero_cost(m);
  for (int i = 0; i < m; ++i) zero_cost[i] = g.edges[i].latency.eval(Rational(0));
  struct LeafInfo {
    Rational cost;                 // B(g)
    std::uint64_t support_edges;   // candidate subnetwork of g
    std::uint64_t ok_paths;        // paths whose bottleneck >= B(g) - eps2
  };
  auto evaluate = [&](const std::vector<int>& counts, int size) {
    std::fill(edge_count.begin(), edge_count.end(), 0);
    std::uint64_t sup = 0;
    for (std::size_t p = 0; p < P; ++p) {
      if (counts[p] == 0) continue;
      sup |= path_mask[p];
      for (const auto& id : paths.paths[p]) edge_count[edge_pos.at(id)] += counts[p];
    }
    std::vector<Rational> cost(m);
    for (int i = 0; i < m; ++i)
      if (edge_count[i] > 0) cost[i] = g.edges[i].latency.eval(rat(edge_count[i], size));
      else cost[i] = zero_cost[i];
    std::vector<Rational> bottleneck(P, Rational(0));
    for (std::size_t p = 0; p < P; ++p)
      for (const auto& id : paths.paths[p])
        bottleneck[p] = std::max(bottleneck[p], cost[edge_pos.at(id)]);
    LeafInfo info;
    info.support_edges = sup;
    Rational b = 0;
    for (std::size_t p = 0; p < P; ++p)
      if (counts[p] > 0) b = std::max(b, bottleneck[p]);
    info.cost = b;
    Rational threshold = b - params.eps2;
    info.ok_paths = 0;
    for (std::size_t p = 0; p < P; ++p)
      if (bottleneck[p] >= threshold) info.ok_paths |= std::uint64_t{1} << p;
    return info;
  };

  // pass 1: discover candidate subnetworks (used-edge sets of candidate flows)
  std::set<std::uint64_t> network_set;
  enumerate_multisets(P, params.k, [&](const std::vector<int>& counts, int /*size*/) {
    std::uint64_t sup = 0;
    for (std::size_t p = 0; p < P; ++p)
      if (counts[p] > 0) sup |= path_mask[p];
    network_set.insert(sup);
  });
  std::vector<std::uint64_t> networks(network_set.begin(), network_set.end());
  std::vector<std::uint64_t> paths_in(networks.size(), 0);
  for (std::size_t h = 0; h < networks.size(); ++h)
    for (std::size_t p = 0; p < P; ++p)
      if ((path_mask[p] & ~networks[h]) == 0) paths_in[h] |= std::uint64_t{1} << p;

  // pass 2: best candidate solution per network
  struct Best {
    bool any = false;
    Rational cost;
    std::vector<int> counts;
    int size = 0;
  };
  std::vector<Best> best(networks.size());
  std::uint64_t visited = 0;
  enumerate_multisets(P, params.k, [&](const std::vector<int>& counts, int size) {
    ++visited;
    LeafInfo info = evaluate(counts, size);
    for (std::size_t h = 0; h < networks.size(); ++h) {
      if ((info.support_edges & ~networks[h]) != 0) continue;  // support not inside H
      if ((paths_in[h] & ~info.ok_paths) != 0) continue;       // not eps2-Nash in H
      if (!best[h].any || info.cost > best[h].cost) {
        best[h] = {true, info.cost, counts, size};
      }
    }
  });

  std::optional<std::size_t> winner;
  auto ids_of = [&](std::uint64_t mask) {
    std::vector<std::string> ids;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) ids.push_back(g.edges[i].id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  for (std::size_t h = 0; h < networks.size(); ++h) {
    if (!best[h].any) continue;
    if (!winner) {
      winner = h;
      continue;
    }
    const Best& cur = best[h];
    const Best& win = best[*winner];
    bool take = false;
    if (cur.cost != win.cost) {
      take = cur.cost < win.cost;
    } else {
      int pc_new = __builtin_popcountll(networks[h]);
      int pc_old = __builtin_popcountll(networks[*winner]);
      if (pc_new != pc_old)
        take = pc_new < pc_old;
      else
        take = ids_of(networks[h]) < ids_of(networks[*winner]);
    }
    if (take) winner = h;
  }
  if (!winner)
    fail(ErrorKind::Feasibility,
         "no candidate solution exists; parameters fall outside the theorem's hypotheses");

  const Best& chosen = best[*winner];
  std::vector<std::pair<EdgePath, Rational>> amounts;
  for (std::size_t p = 0; p < P; ++p)
    if (chosen.counts[p] > 0)
      amounts.emplace_back(paths.paths[p], rat(chosen.counts[p], chosen.size));
  ApproxResult result;
  result.subnetwork = ids_of(networks[*winner]);
  result.flow = make_flow(instance, std::move(amounts));
  result.candidate_cost = chosen.cost;
  result.report.subnetwork = result.subnetwork;
  result.report.worst_cost = chosen.cost;
  result.report.witness = result.flow;
  result.report.enumerated = visited;
  return result;
}

}  // namespace braess
