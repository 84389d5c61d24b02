#include "braess/io.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "json.hpp"

namespace braess {

namespace {

using nlohmann::json;

Rational parse_rat_field(const json& j, const std::string& where) {
  if (!j.is_string())
    fail(ErrorKind::Parse, "malformed-rational: " + where + " must be a \"p/q\" string");
  auto r = parse_rational(j.get<std::string>());
  if (!r)
    fail(ErrorKind::Parse, "malformed-rational: " + where + " = " + j.get<std::string>());
  return *r;
}

json rat_json(const Rational& r) { return rat_str(r); }

LatencyFunction parse_latency(const json& j, const std::string& edge_id) {
  if (!j.is_object()) fail(ErrorKind::Parse, "bad-document: latency of " + edge_id);
  std::string type = j.value("type", "");
  if (type == "linear")
    return LatencyFunction::linear(parse_rat_field(j.at("a"), edge_id + ".a"));
  if (type == "affine")
    return LatencyFunction::affine(parse_rat_field(j.at("a"), edge_id + ".a"),
                                   parse_rat_field(j.at("b"), edge_id + ".b"));
  if (type == "monotone") {
    if (!j.contains("table") || !j.at("table").is_array())
      fail(ErrorKind::Parse, "bad-document: monotone latency of " + edge_id + " needs a table");
    std::vector<std::pair<Rational, Rational>> table;
    for (const auto& row : j.at("table")) {
      if (!row.is_array() || row.size() != 2)
        fail(ErrorKind::Parse, "bad-document: table row of " + edge_id);
      table.emplace_back(parse_rat_field(row[0], edge_id + ".table.load"),
                         parse_rat_field(row[1], edge_id + ".table.cost"));
    }
    return LatencyFunction::monotone(std::move(table),
                                     parse_rat_field(j.at("xi"), edge_id + ".xi"));
  }
  fail(ErrorKind::Parse, "unknown-latency-type: " + type + " on edge " + edge_id);
}

json emit_latency(const LatencyFunction& lat) {
  json j;
  switch (lat.kind) {
    case LatencyKind::Linear:
      j["type"] = "linear";
      j["a"] = rat_json(lat.a);
      break;
    case LatencyKind::Affine:
      j["type"] = "affine";
      j["a"] = rat_json(lat.a);
      j["b"] = rat_json(lat.b);
      break;
    case LatencyKind::GeneralMonotone: {
      j["type"] = "monotone";
      json table = json::array();
      for (const auto& [x, y] : lat.table) table.push_back({rat_json(x), rat_json(y)});
      j["table"] = table;
      break;
    }
  }
  j["xi"] = rat_json(lat.xi);
  return j;
}

}  // namespace

InstancePtr parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad-document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") ||
      !doc.contains("source") || !doc.contains("sink"))
    fail(ErrorKind::Parse, "bad-document: need nodes, source, sink, edges");

  std::vector<std::string> nodes = doc.at("nodes").get<std::vector<std::string>>();
  std::set<std::string> node_set(nodes.begin(), nodes.end());
  std::string source = doc.at("source").get<std::string>();
  std::string sink = doc.at("sink").get<std::string>();
  Rational rate = doc.contains("rate") ? parse_rat_field(doc.at("rate"), "rate") : Rational(1);

  std::vector<EdgeDef> edges;
  std::set<std::string> edge_ids;
  std::vector<std::string> all_ids;
  for (const auto& je : doc.at("edges")) {
    std::string id = je.at("id").get<std::string>();
    std::string tail = je.at("tail").get<std::string>();
    std::string head = je.at("head").get<std::string>();
    if (!edge_ids.insert(id).second) fail(ErrorKind::Parse, "duplicate-edge-id: " + id);
    if (!node_set.count(tail))
      fail(ErrorKind::Parse, "dangling-node-reference: edge " + id + " tail " + tail);
    if (!node_set.count(head))
      fail(ErrorKind::Parse, "dangling-node-reference: edge " + id + " head " + head);
    if (tail == head) fail(ErrorKind::Parse, "self-loop: " + id);
    EdgeDef e;
    e.id = id;
    e.latency = parse_latency(je.at("latency"), id);
    // indices resolved by make_instance; store via node lookup below
    e.tail = static_cast<int>(std::find(nodes.begin(), nodes.end(), tail) - nodes.begin());
    e.head = static_cast<int>(std::find(nodes.begin(), nodes.end(), head) - nodes.begin());
    edges.push_back(std::move(e));
    all_ids.push_back(id);
  }

  std::optional<GadgetMetadata> gadget;
  if (doc.contains("metadata") && doc.at("metadata").is_object()) {
    const json& jm = doc.at("metadata");
    GadgetMetadata meta;
    meta.gamma1 = parse_rat_field(jm.at("gamma1"), "metadata.gamma1");
    meta.gamma2 = parse_rat_field(jm.at("gamma2"), "metadata.gamma2");
    meta.level = jm.at("level").get<int>();
    meta.eps = parse_rat_field(jm.at("eps"), "metadata.eps");
    if (jm.contains("external_edges"))
      for (auto it = jm.at("external_edges").begin(); it != jm.at("external_edges").end(); ++it)
        meta.external_edges[it.key()] = it.value().get<std::string>();
    if (jm.contains("d_copies"))
      for (const auto& jc : jm.at("d_copies")) {
        DCopyRef c;
        c.prefix = jc.at("prefix").get<std::string>();
        c.s1 = jc.at("s1").get<std::string>();
        c.s2 = jc.at("s2").get<std::string>();
        c.t1 = jc.at("t1").get<std::string>();
        c.t2 = jc.at("t2").get<std::string>();
        c.edge_ids = jc.at("edge_ids").get<std::vector<std::string>>();
        meta.d_copies.push_back(std::move(c));
      }
    gadget = std::move(meta);
  }

  // surface the missing-path case as a named parse error
  try {
    return make_instance(std::move(nodes), source, sink, std::move(edges), rate,
                         std::move(gadget));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Structure &&
        std::string(e.what()).find("no s-t path") != std::string::npos)
      fail(ErrorKind::Parse, "missing-st-path");
    throw;
  }
}

std::string emit_instance(const RoutingInstance& instance) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["nodes"] = instance.nodes;
  doc["source"] = instance.nodes[instance.source];
  doc["sink"] = instance.nodes[instance.sink];
  doc["rate"] = rat_json(instance.rate);
  json edges = json::array();
  for (const auto& e : instance.edges) {
    json je;
    je["id"] = e.id;
    je["tail"] = instance.nodes[e.tail];
    je["head"] = instance.nodes[e.head];
    je["latency"] = emit_latency(e.latency);
    edges.push_back(je);
  }
  doc["edges"] = edges;
  if (instance.gadget) {
    const auto& meta = *instance.gadget;
    json jm;
    jm["gamma1"] = rat_json(meta.gamma1);
    jm["gamma2"] = rat_json(meta.gamma2);
    jm["level"] = meta.level;
    jm["eps"] = rat_json(meta.eps);
    json ext = json::object();
    for (const auto& [k, v] : meta.external_edges) ext[k] = v;
    jm["external_edges"] = ext;
    json copies = json::array();
    for (const auto& c : meta.d_copies) {
      json jc;
      jc["prefix"] = c.prefix;
      jc["s1"] = c.s1;
      jc["s2"] = c.s2;
      jc["t1"] = c.t1;
      jc["t2"] = c.t2;
      jc["edge_ids"] = c.edge_ids;
      copies.push_back(jc);
    }
    jm["d_copies"] = copies;
    doc["metadata"] = jm;
  }
  return doc.dump(2);
}

Flow parse_flow(const std::string& text, const InstancePtr& instance) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad-document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("paths"))
    fail(ErrorKind::Parse, "bad-document: flow needs a paths array");
  std::vector<std::pair<EdgePath, Rational>> paths;
  for (const auto& jp : doc.at("paths")) {
    EdgePath path = jp.at("edges").get<std::vector<std::string>>();
    paths.emplace_back(std::move(path), parse_rat_field(jp.at("flow"), "path flow"));
  }
  return make_flow(instance, std::move(paths));
}

std::string emit_flow(const Flow& flow) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json paths = json::array();
  for (const auto& [path, amount] : flow.path_flows) {
    json jp;
    jp["edges"] = path;
    jp["flow"] = rat_json(amount);
    paths.push_back(jp);
  }
  doc["paths"] = paths;
  return doc.dump(2);
}

TwoDDPInstance parse_2ddp(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad-document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges"))
    fail(ErrorKind::Parse, "bad-document: 2DDP needs nodes and edges");
  DirectedGraph g;
  g.nodes = doc.at("nodes").get<std::vector<std::string>>();
  for (const auto& je : doc.at("edges"))
    g.edges.emplace_back(je.at("id").get<std::string>(), je.at("tail").get<std::string>(),
                         je.at("head").get<std::string>());
  return make_2ddp(std::move(g), doc.at("s1").get<std::string>(),
                   doc.at("s2").get<std::string>(), doc.at("t1").get<std::string>(),
                   doc.at("t2").get<std::string>());
}

std::string emit_2ddp(const TwoDDPInstance& d) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["nodes"] = d.network.nodes;
  json edges = json::array();
  for (const auto& [id, tail, head] : d.network.edges) {
    json je;
    je["id"] = id;
    je["tail"] = tail;
    je["head"] = head;
    edges.push_back(je);
  }
  doc["edges"] = edges;
  doc["s1"] = d.s1;
  doc["s2"] = d.s2;
  doc["t1"] = d.t1;
  doc["t2"] = d.t2;
  return doc.dump(2);
}

namespace {

// display form for DOT labels: integers plain, otherwise p/q
std::string compact(const Rational& r) {
  Rational v = r;
  v.canonicalize();
  if (v.get_den() == 1) return v.get_num().get_str();
  return rat_str(v);
}

}  // namespace

std::string export_dot(const RoutingInstance& instance, const Flow* flow) {
  std::ostringstream out;
  out << "digraph braess {\n  rankdir=LR;\n";
  out << "  \"" << instance.nodes[instance.source] << "\" [shape=doublecircle];\n";
  out << "  \"" << instance.nodes[instance.sink] << "\" [shape=doublecircle];\n";
  std::map<std::string, Rational> loads;
  std::map<std::string, Rational> costs;
  std::set<std::string> cut;
  if (flow) {
    loads = edge_loads(*flow);
    CostReport report = bottleneck_cost(*flow);
    costs = report.edge_latencies;
    NashCertificate cert = is_nash_flow(*flow);
    if (cert.verdict)
      cut.insert(cert.blocking_cut->begin(), cert.blocking_cut->end());
  }
  for (const auto& e : instance.edges) {
    out << "  \"" << instance.nodes[e.tail] << "\" -> \"" << instance.nodes[e.head] << "\"";
    out << " [label=\"" << e.id;
    if (flow) out << ": " << compact(loads.at(e.id)) << " / " << compact(costs.at(e.id));
    out << "\"";
    if (cut.count(e.id)) out << ", color=red, penwidth=2";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

std::string instance_digest(const RoutingInstance& instance) {
  std::string canonical = emit_instance(instance);
  std::uint64_t hash = 1469598103934665603ull;  // FNV-1a 64
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((hash >> shift) & 0xf);
  return out.str();
}

}  // namespace braess
