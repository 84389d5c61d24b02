#pragma once

#include <optional>
#include <string>
#include <vector>

#include "braess/constructions.hpp"
#include "braess/equilibrium.hpp"
#include "braess/game.hpp"

namespace braess {

inline constexpr int kSchemaVersion = 1;

// Instance documents (JSON). Rationals are serialized as "p/q" strings,
// never as decimals. Parse errors carry a named code prefix:
//   malformed-rational, unknown-latency-type, dangling-node-reference,
//   missing-st-path, duplicate-edge-id, self-loop, bad-document.
InstancePtr parse_instance(const std::string& text);
std::string emit_instance(const RoutingInstance& instance);

// Flow documents tied to an instance.
Flow parse_flow(const std::string& text, const InstancePtr& instance);
std::string emit_flow(const Flow& flow);

// 2DDP documents: {nodes, edges: [{id, tail, head}], s1, s2, t1, t2}.
TwoDDPInstance parse_2ddp(const std::string& text);
std::string emit_2ddp(const TwoDDPInstance& d);

// DOT digraph; with a flow, edge labels carry "f_e / c_e(f_e)" and the
// edges of the Nash certificate's blocking cut are highlighted.
std::string export_dot(const RoutingInstance& instance, const Flow* flow = nullptr);

// FNV-1a content digest of the canonical instance document.
std::string instance_digest(const RoutingInstance& instance);

}  // namespace braess
