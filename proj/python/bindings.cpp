#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "braess/cli.hpp"
#include "braess/constructions.hpp"
#include "braess/equilibrium.hpp"
#include "braess/errors.hpp"
#include "braess/game.hpp"
#include "braess/io.hpp"
#include "braess/subnet_search.hpp"
#include "braess/topology.hpp"

namespace py = pybind11;
using namespace braess;

namespace {

// pybind11 holders cannot be shared_ptr<const T>, so wrap the library's
// immutable instances in a small handle.
struct PyInstance {
  InstancePtr ptr;
  const RoutingInstance& ref() const { return *ptr; }
};

using PyFlow = std::vector<std::pair<std::vector<std::string>, std::string>>;

Rational parse_rat_or_throw(const std::string& text, const char* what) {
  auto r = parse_rational(text);
  if (!r) throw py::value_error(std::string("malformed rational for ") + what + ": " + text);
  return *r;
}

Flow flow_from_py(const InstancePtr& instance, const PyFlow& paths) {
  std::vector<std::pair<EdgePath, Rational>> raw;
  for (const auto& [path, amount] : paths)
    raw.emplace_back(path, parse_rat_or_throw(amount, "path flow"));
  return make_flow(instance, std::move(raw));
}

PyFlow flow_to_py(const Flow& flow) {
  PyFlow out;
  for (const auto& [path, amount] : flow.path_flows) out.emplace_back(path, rat_str(amount));
  return out;
}

py::dict report_to_py(const SubnetworkReport& report) {
  py::dict d;
  d["subnetwork"] = report.subnetwork;
  d["worst_cost"] = rat_str(report.worst_cost);
  d["witness"] = flow_to_py(report.witness);
  if (report.classification) d["classification"] = to_string(*report.classification);
  if (report.improvement) d["improvement"] = rat_str(*report.improvement);
  d["enumerated"] = report.enumerated;
  return d;
}

}  // namespace

PYBIND11_MODULE(braess, m) {
  m.doc() = "exact solvers for Braess's paradox in bottleneck routing games";

  py::class_<PyInstance>(m, "Instance")
      .def_property_readonly("nodes", [](const PyInstance& g) { return g.ref().nodes; })
      .def_property_readonly("num_edges",
                             [](const PyInstance& g) { return g.ref().edges.size(); })
      .def_property_readonly("edge_ids",
                             [](const PyInstance& g) {
                               std::vector<std::string> ids;
                               for (const auto& e : g.ref().edges) ids.push_back(e.id);
                               return ids;
                             })
      .def_property_readonly("rate", [](const PyInstance& g) { return rat_str(g.ref().rate); })
      .def("__repr__", [](const PyInstance& g) {
        std::ostringstream s;
        s << "<braess.Instance " << g.ref().nodes.size() << " nodes, "
          << g.ref().edges.size() << " edges, rate " << rat_str(g.ref().rate) << ">";
        return s.str();
      });

  m.def("parse_instance",
        [](const std::string& text) { return PyInstance{parse_instance(text)}; },
        py::arg("text"));
  m.def("emit_instance",
        [](const PyInstance& g) { return emit_instance(g.ref()); }, py::arg("instance"));
  m.def("instance_digest",
        [](const PyInstance& g) { return instance_digest(g.ref()); }, py::arg("instance"));
  m.def("subnetwork",
        [](const PyInstance& g, const std::vector<std::string>& edges) -> py::object {
          InstancePtr sub = subnetwork(g.ptr, edges);
          if (!sub) return py::none();
          return py::cast(PyInstance{sub});
        },
        py::arg("instance"), py::arg("edge_ids"));

  m.def("enumerate_paths",
        [](const PyInstance& g, std::size_t max_paths) {
          return enumerate_paths(g.ref(), max_paths).paths;
        },
        py::arg("instance"), py::arg("max_paths") = kDefaultMaxPaths);
  m.def("enumerate_st_cuts",
        [](const PyInstance& g, int bound) { return enumerate_st_cuts(g.ref(), bound); },
        py::arg("instance"), py::arg("node_bound") = kDefaultCutNodeBound);
  m.def("max_flow",
        [](const PyInstance& g, const std::map<std::string, std::string>& caps) {
          std::map<std::string, Rational> parsed;
          for (const auto& [id, text] : caps)
            parsed[id] = parse_rat_or_throw(text, "capacity");
          return rat_str(max_flow(g.ref(), parsed));
        },
        py::arg("instance"), py::arg("capacities"));
  m.def("is_series_parallel",
        [](const PyInstance& g) { return series_parallel_decompose(g.ref()).has_value(); },
        py::arg("instance"));

  m.def("edge_loads",
        [](const PyInstance& g, const PyFlow& flow) {
          std::map<std::string, std::string> out;
          for (const auto& [id, load] : edge_loads(flow_from_py(g.ptr, flow)))
            out[id] = rat_str(load);
          return out;
        },
        py::arg("instance"), py::arg("flow"));
  m.def("bottleneck_cost",
        [](const PyInstance& g, const PyFlow& flow) {
          return rat_str(bottleneck_cost(flow_from_py(g.ptr, flow)).bottleneck);
        },
        py::arg("instance"), py::arg("flow"));
  m.def("is_eps_nash",
        [](const PyInstance& g, const PyFlow& flow, const std::string& eps) {
          return is_eps_nash(flow_from_py(g.ptr, flow), parse_rat_or_throw(eps, "eps"));
        },
        py::arg("instance"), py::arg("flow"), py::arg("eps"));
  m.def("is_nash_flow",
        [](const PyInstance& g, const PyFlow& flow) {
          NashCertificate cert = is_nash_flow(flow_from_py(g.ptr, flow));
          py::dict d;
          d["verdict"] = cert.verdict;
          if (cert.blocking_cut) d["blocking_cut"] = *cert.blocking_cut;
          if (cert.violation) d["violation"] = *cert.violation;
          return d;
        },
        py::arg("instance"), py::arg("flow"));

  m.def("optimal_bottleneck_cost",
        [](const PyInstance& g) {
          OptimalResult opt = optimal_bottleneck_cost(g.ptr);
          py::dict d;
          d["cost"] = rat_str(opt.cost);
          d["exact"] = opt.exact;
          d["witness"] = flow_to_py(opt.witness);
          return d;
        },
        py::arg("instance"));
  m.def("worst_nash_flow",
        [](const PyInstance& g) {
          WorstNashResult res = worst_nash_flow(g.ptr);
          py::dict d;
          d["cost"] = rat_str(res.cost);
          d["cut"] = res.cut;
          d["flow"] = flow_to_py(res.flow);
          return d;
        },
        py::arg("instance"));
  m.def("subpath_optimal_nash_flow",
        [](const PyInstance& g) {
          SubpathOptimalResult res = subpath_optimal_nash_flow(g.ptr);
          py::dict d;
          d["flow"] = flow_to_py(res.flow);
          py::dict labels;
          for (const auto& [node, label] : res.labels.labels)
            labels[py::str(node)] = rat_str(label);
          d["labels"] = labels;
          return d;
        },
        py::arg("instance"));
  m.def("price_of_anarchy",
        [](const PyInstance& g) { return rat_str(price_of_anarchy(g.ptr)); },
        py::arg("instance"));
  m.def("scale_latencies",
        [](const PyInstance& g, const std::string& alpha) {
          return PyInstance{scale_latencies(g.ptr, parse_rat_or_throw(alpha, "alpha"))};
        },
        py::arg("instance"), py::arg("alpha"));
  m.def("normalize_rate", [](const PyInstance& g) { return PyInstance{normalize_rate(g.ptr)}; },
        py::arg("instance"));

  m.def("k_of_eps",
        [](const std::string& eps, int m_edges) {
          return k_of_eps(parse_rat_or_throw(eps, "eps"), m_edges);
        },
        py::arg("eps"), py::arg("num_edges"));
  m.def("sparsify_flow",
        [](const PyInstance& g, const PyFlow& flow, const std::string& eps,
           std::uint64_t seed) {
          CandidateFlow cf = sparsify_flow(flow_from_py(g.ptr, flow),
                                           parse_rat_or_throw(eps, "eps"), seed);
          py::dict d;
          std::vector<std::pair<std::vector<std::string>, int>> multiset(cf.multiset.begin(),
                                                                         cf.multiset.end());
          d["multiset"] = multiset;
          d["size"] = cf.size;
          d["flow"] = flow_to_py(cf.flow);
          return d;
        },
        py::arg("instance"), py::arg("flow"), py::arg("eps"), py::arg("seed") = 0);
  m.def("exhaustive_best_subnetwork",
        [](const PyInstance& g) { return report_to_py(exhaustive_best_subnetwork(g.ptr)); },
        py::arg("instance"));
  m.def("classify_paradox",
        [](const PyInstance& g) { return report_to_py(classify_paradox(g.ptr)); },
        py::arg("instance"));
  m.def("approx_best_subnetwork",
        [](const PyInstance& g, const std::string& eps, const std::string& delta,
           const std::string& xi) {
          ApproxParams params =
              make_approx_params(parse_rat_or_throw(eps, "eps"),
                                 parse_rat_or_throw(delta, "delta"),
                                 parse_rat_or_throw(xi, "xi"),
                                 static_cast<int>(g.ref().edges.size()));
          ApproxResult res = approx_best_subnetwork(g.ptr, params);
          py::dict d;
          d["subnetwork"] = res.subnetwork;
          d["flow"] = flow_to_py(res.flow);
          d["candidate_cost"] = rat_str(res.candidate_cost);
          d["k"] = params.k;
          d["eps1"] = rat_str(params.eps1);
          d["eps2"] = rat_str(params.eps2);
          d["enumerated"] = res.report.enumerated;
          return d;
        },
        py::arg("instance"), py::arg("eps"), py::arg("delta"), py::arg("xi"));

  m.def("gen_gap",
        [](const std::string& ddp_json, py::object eps, int levels, const std::string& rate) {
          TwoDDPInstance d = parse_2ddp(ddp_json);
          Rational r = parse_rat_or_throw(rate, "rate");
          std::optional<Rational> eps_opt;
          if (!eps.is_none()) eps_opt = parse_rat_or_throw(eps.cast<std::string>(), "eps");
          GapNetwork gap = build_gap_network(d, eps_opt ? *eps_opt : rat(1, 8), r);
          for (int i = 0; i < levels; ++i)
            gap = amplify_gap(d, gap, eps_opt ? *eps_opt : 1 / (8 * gap.gamma1));
          return emit_instance(*gap.instance);
        },
        py::arg("ddp_json"), py::arg("eps") = py::none(), py::arg("levels") = 0,
        py::arg("rate") = "1/1");
  m.def("classify_2ddp",
        [](const std::string& ddp_json) {
          TwoDDPInstance d = parse_2ddp(ddp_json);
          TwoDDPVerdict v = classify_2ddp(d);
          py::dict out;
          out["yes"] = v.yes;
          if (v.yes) {
            out["path_s1_t1"] = v.path_s1_t1;
            out["path_s2_t2"] = v.path_s2_t2;
          }
          return out;
        },
        py::arg("ddp_json"));

  m.def("export_dot",
        [](const PyInstance& g, py::object flow) {
          if (flow.is_none()) return export_dot(g.ref(), nullptr);
          Flow f = flow_from_py(g.ptr, flow.cast<PyFlow>());
          return export_dot(g.ref(), &f);
        },
        py::arg("instance"), py::arg("flow") = py::none());

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          int code = run_command(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });
}
