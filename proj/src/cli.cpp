#include "braess/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "braess/constructions.hpp"
#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/game.hpp"
#include "braess/io.hpp"
#include "braess/subnet_search.hpp"
#include "braess/topology.hpp"
#include "json.hpp"

namespace braess {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json flow_to_json(const Flow& flow) {
  json paths = json::array();
  for (const auto& [path, amount] : flow.path_flows) {
    json jp;
    jp["edges"] = path;
    jp["flow"] = rat_str(amount);
    paths.push_back(jp);
  }
  return paths;
}

void emit_table(const json& outputs, const std::string& format, std::ostream& out) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (auto it = outputs.begin(); it != outputs.end(); ++it) {
    const json& v = it.value();
    if (v.is_string())
      rows.emplace_back(it.key(), v.get<std::string>());
    else if (v.is_number_integer())
      rows.emplace_back(it.key(), std::to_string(v.get<long long>()));
    else if (v.is_boolean())
      rows.emplace_back(it.key(), v.get<bool>() ? "true" : "false");
    else
      rows.emplace_back(it.key(), v.dump());
  }
  if (format == "md") {
    out << "\n| key | value |\n|---|---|\n";
    for (const auto& [k, v] : rows) out << "| " << k << " | " << v << " |\n";
  } else if (format == "csv") {
    out << "\nkey,value\n";
    for (const auto& [k, v] : rows) {
      std::string quoted = v;
      if (quoted.find(',') != std::string::npos || quoted.find('"') != std::string::npos) {
        std::string escaped = "\"";
        for (char c : quoted) escaped += (c == '"') ? std::string("\"\"") : std::string(1, c);
        escaped += "\"";
        quoted = escaped;
      }
      out << k << "," << quoted << "\n";
    }
  }
}

struct GadgetRequest {
  std::string ddp_path;
  std::string eps_text;  // empty -> default midpoint per level
  int levels = 0;
  std::string rate_text = "1/1";
};

struct BuiltGadget {
  TwoDDPInstance d;
  GapNetwork gap;
};

BuiltGadget build_requested_gadget(const GadgetRequest& req) {
  TwoDDPInstance d = parse_2ddp(read_file(req.ddp_path));
  Rational rate = [&] {
    auto r = parse_rational(req.rate_text);
    if (!r || *r < 0) fail(ErrorKind::Usage, "bad rate: " + req.rate_text);
    return *r;
  }();
  std::optional<Rational> eps;
  if (!req.eps_text.empty()) {
    auto e = parse_rational(req.eps_text);
    if (!e) fail(ErrorKind::Usage, "bad eps: " + req.eps_text);
    eps = *e;
  }
  // defaults: 1/8 at level 0, 1/(8*gamma1) per amplification (interval midpoints)
  GapNetwork gap = build_gap_network(d, eps ? *eps : rat(1, 8), rate);
  for (int level = 0; level < req.levels; ++level) {
    Rational next_eps = eps ? *eps : 1 / (8 * gap.gamma1);
    gap = amplify_gap(d, gap, next_eps);
  }
  if (gap.instance->rate != rate)
    gap.instance = make_instance(gap.instance->nodes,
                                 gap.instance->nodes[gap.instance->source],
                                 gap.instance->nodes[gap.instance->sink],
                                 gap.instance->edges, rate, gap.instance->gadget);
  return {std::move(d), std::move(gap)};
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Domain:
    case ErrorKind::Parse:
      return 2;
    case ErrorKind::Capacity:
      return 3;
    case ErrorKind::Feasibility:
    case ErrorKind::UnsupportedModel:
    case ErrorKind::Structure:
    case ErrorKind::SearchFailure:
      return 4;
    case ErrorKind::Internal:
      return 1;
  }
  return 1;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact solvers and gadget generators for bottleneck routing games"};
  app.name("braess");
  app.require_subcommand(1);

  std::string instance_path, table_format, flow_path, out_path;
  std::string eps_text, delta_text, xi_text, rate_text = "1/1";
  std::uint64_t seed = 0;
  GadgetRequest gadget_req;

  auto add_instance_opt = [&](CLI::App* cmd) {
    cmd->add_option("-i,--input", instance_path, "instance document (JSON)")->required();
  };
  auto add_table_opt = [&](CLI::App* cmd) {
    cmd->add_option("--table", table_format, "append a table rendering")
        ->check(CLI::IsMember({"md", "csv"}));
  };

  CLI::App* solve_opt = app.add_subcommand("solve-opt", "optimal bottleneck cost B*(G)");
  add_instance_opt(solve_opt);
  add_table_opt(solve_opt);

  CLI::App* worst = app.add_subcommand("worst-nash", "worst equilibrium bottleneck cost");
  add_instance_opt(worst);
  add_table_opt(worst);

  CLI::App* poa = app.add_subcommand("poa", "price of anarchy B(G)/B*(G)");
  add_instance_opt(poa);
  add_table_opt(poa);

  CLI::App* classify = app.add_subcommand("classify", "paradox classification");
  add_instance_opt(classify);
  add_table_opt(classify);

  CLI::App* best = app.add_subcommand("best-subnet", "exhaustive best subnetwork");
  add_instance_opt(best);
  add_table_opt(best);

  CLI::App* approx =
      app.add_subcommand("approx-best-subnet", "candidate-enumeration approximation");
  add_instance_opt(approx);
  add_table_opt(approx);
  approx->add_option("--eps", eps_text, "additive accuracy eps")->required();
  approx->add_option("--delta", delta_text, "minimum used-edge flow delta")->required();
  approx->add_option("--xi", xi_text, "Lipschitz constant xi")->required();
  approx->add_option("--seed", seed, "sampling seed (reports only)");

  CLI::App* sparsify = app.add_subcommand("sparsify", "sparse approximation of a flow");
  add_instance_opt(sparsify);
  add_table_opt(sparsify);
  sparsify->add_option("--eps", eps_text, "per-edge deviation bound")->required();
  sparsify->add_option("--flow", flow_path, "flow document (JSON)")->required();
  sparsify->add_option("--seed", seed, "sampling seed");

  CLI::App* gen = app.add_subcommand("gen-gap", "generate a gap instance from a 2DDP input");
  add_table_opt(gen);
  gen->add_option("--ddp", gadget_req.ddp_path, "2DDP document (JSON)")->required();
  gen->add_option("--eps", gadget_req.eps_text, "latency eps (default: interval midpoint)");
  gen->add_option("--levels", gadget_req.levels, "amplification rounds")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--rate", gadget_req.rate_text, "traffic rate");
  gen->add_option("-o,--output", out_path, "write the instance document here");

  CLI::App* witness = app.add_subcommand("witness-flows", "the gadget analysis flows");
  add_table_opt(witness);
  witness->add_option("--ddp", gadget_req.ddp_path, "2DDP document (JSON)")->required();
  witness->add_option("--eps", gadget_req.eps_text, "latency eps");
  witness->add_option("--levels", gadget_req.levels, "amplification rounds")
      ->check(CLI::NonNegativeNumber);
  witness->add_option("--rate", gadget_req.rate_text, "traffic rate")->required();

  CLI::App* paths_cmd = app.add_subcommand("paths", "enumerate simple s-t paths");
  add_instance_opt(paths_cmd);
  add_table_opt(paths_cmd);

  CLI::App* cuts_cmd = app.add_subcommand("cuts", "enumerate s-t cuts");
  add_instance_opt(cuts_cmd);
  add_table_opt(cuts_cmd);

  CLI::App* dot = app.add_subcommand("export-dot", "DOT rendering of an instance");
  add_instance_opt(dot);
  dot->add_option("--flow", flow_path, "flow document to annotate with");
  dot->add_option("-o,--output", out_path, "write the DOT text here");

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto started = std::chrono::steady_clock::now();
  json result;
  result["schema_version"] = kSchemaVersion;
  json outputs;
  json enumeration = json::object();

  auto parse_rat_arg = [&](const std::string& text, const std::string& name) {
    auto r = parse_rational(text);
    if (!r) fail(ErrorKind::Usage, "bad " + name + ": " + text);
    return *r;
  };

  try {
    CLI::App* cmd = app.get_subcommands().front();
    result["command"] = cmd->get_name();
    json params = json::object();
    InstancePtr instance;
    if (!instance_path.empty() && cmd->get_name() != "gen-gap" &&
        cmd->get_name() != "witness-flows") {
      instance = parse_instance(read_file(instance_path));
      result["input"] = {{"path", instance_path}, {"digest", instance_digest(*instance)}};
    }

    if (cmd == solve_opt) {
      OptimalResult opt = optimal_bottleneck_cost(instance);
      outputs["optimal_cost"] = rat_str(opt.cost);
      outputs["exact"] = opt.exact;
      outputs["witness"] = flow_to_json(opt.witness);
    } else if (cmd == worst) {
      WorstNashResult res = worst_nash_flow(instance);
      outputs["worst_cost"] = rat_str(res.cost);
      outputs["cut"] = res.cut;
      outputs["flow"] = flow_to_json(res.flow);
    } else if (cmd == poa) {
      OptimalResult opt = optimal_bottleneck_cost(instance);
      WorstNashResult res = worst_nash_flow(instance);
      outputs["poa"] = rat_str(res.cost / opt.cost);
      outputs["optimal_cost"] = rat_str(opt.cost);
      outputs["worst_cost"] = rat_str(res.cost);
    } else if (cmd == classify || cmd == best) {
      SubnetworkReport report = classify_paradox(instance);
      outputs["best_subnetwork"] = report.subnetwork;
      outputs["worst_cost"] = rat_str(report.worst_cost);
      outputs["classification"] = to_string(*report.classification);
      outputs["improvement"] = rat_str(*report.improvement);
      outputs["witness"] = flow_to_json(report.witness);
      enumeration["subnetworks"] = report.enumerated;
    } else if (cmd == approx) {
      Rational eps = parse_rat_arg(eps_text, "eps");
      Rational delta = parse_rat_arg(delta_text, "delta");
      Rational xi = parse_rat_arg(xi_text, "xi");
      params["eps"] = rat_str(eps);
      params["delta"] = rat_str(delta);
      params["xi"] = rat_str(xi);
      params["seed"] = seed;
      ApproxParams ap = make_approx_params(eps, delta, xi,
                                           static_cast<int>(instance->edges.size()));
      ApproxResult res = approx_best_subnetwork(instance, ap);
      outputs["subnetwork"] = res.subnetwork;
      outputs["candidate_cost"] = rat_str(res.candidate_cost);
      outputs["flow"] = flow_to_json(res.flow);
      outputs["k"] = ap.k;
      outputs["eps1"] = rat_str(ap.eps1);
      outputs["eps2"] = rat_str(ap.eps2);
      enumeration["candidate_flows"] = res.report.enumerated;
    } else if (cmd == sparsify) {
      Rational eps = parse_rat_arg(eps_text, "eps");
      params["eps"] = rat_str(eps);
      params["seed"] = seed;
      Flow flow = parse_flow(read_file(flow_path), instance);
      CandidateFlow cf = sparsify_flow(flow, eps, seed);
      json multiset = json::array();
      for (const auto& [path, count] : cf.multiset) {
        json jp;
        jp["edges"] = path;
        jp["count"] = count;
        multiset.push_back(jp);
      }
      outputs["multiset"] = multiset;
      outputs["size"] = cf.size;
      outputs["k"] = k_of_eps(eps, static_cast<int>(instance->edges.size()));
      outputs["flow"] = flow_to_json(cf.flow);
    } else if (cmd == gen) {
      BuiltGadget built = build_requested_gadget(gadget_req);
      params["levels"] = gadget_req.levels;
      std::string doc = emit_instance(*built.gap.instance);
      outputs["gamma1"] = rat_str(built.gap.gamma1);
      outputs["gamma2"] = rat_str(built.gap.gamma2);
      outputs["level"] = built.gap.level;
      outputs["eps"] = rat_str(built.gap.eps);
      outputs["nodes"] = built.gap.instance->nodes.size();
      outputs["edges"] = built.gap.instance->edges.size();
      outputs["digest"] = instance_digest(*built.gap.instance);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) fail(ErrorKind::Usage, "cannot write file: " + out_path);
        f << doc;
        outputs["written"] = out_path;
      } else {
        outputs["instance"] = json::parse(doc);
      }
    } else if (cmd == witness) {
      BuiltGadget built = build_requested_gadget(gadget_req);
      params["levels"] = gadget_req.levels;
      params["rate"] = gadget_req.rate_text;
      Rational r = parse_rat_arg(gadget_req.rate_text, "rate");
      auto flows = build_witness_flows(built.d, built.gap, r);
      json arr = json::array();
      for (const auto& w : flows) {
        json jw;
        jw["role"] = w.role == WitnessRole::Optimal ? "optimal"
                     : w.role == WitnessRole::GoodEquilibrium ? "good-equilibrium"
                                                              : "bad-equilibrium";
        jw["expected_cost"] = rat_str(w.expected_cost);
        jw["subnetwork_edges"] = w.subnetwork.size();
        InstancePtr sub = subnetwork(w.flow.instance, w.subnetwork);
        bool verified = false;
        Rational cost = 0;
        if (sub) {
          Flow on_sub = make_flow(sub, w.flow.path_flows);
          verified = is_nash_flow(on_sub).verdict;
          cost = bottleneck_cost(on_sub).bottleneck;
        }
        jw["nash_verified"] = verified;
        jw["cost"] = rat_str(cost);
        jw["flow"] = flow_to_json(w.flow);
        arr.push_back(jw);
      }
      outputs["witnesses"] = arr;
    } else if (cmd == paths_cmd) {
      PathSet ps = enumerate_paths(*instance);
      outputs["count"] = ps.paths.size();
      json arr = json::array();
      for (const auto& p : ps.paths) arr.push_back(p);
      outputs["paths"] = arr;
    } else if (cmd == cuts_cmd) {
      auto cuts = enumerate_st_cuts(*instance);
      outputs["count"] = cuts.size();
      json arr = json::array();
      for (const auto& c : cuts) arr.push_back(c);
      outputs["cuts"] = arr;
    } else if (cmd == dot) {
      std::optional<Flow> flow;
      if (!flow_path.empty()) flow = parse_flow(read_file(flow_path), instance);
      std::string text = export_dot(*instance, flow ? &*flow : nullptr);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) fail(ErrorKind::Usage, "cannot write file: " + out_path);
        f << text;
        outputs["written"] = out_path;
      } else {
        outputs["dot"] = text;
      }
    }

    result["parameters"] = params;
    result["outputs"] = outputs;
    result["enumeration"] = enumeration;
    auto elapsed = std::chrono::steady_clock::now() - started;
    result["meta"] = {
        {"wall_time_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()}};
    out << result.dump(2) << "\n";
    if (!table_format.empty()) emit_table(outputs, table_format, out);
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace braess
