#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "eagle/pipeline.hpp"

namespace py = pybind11;
using namespace eagle;

namespace {

py::dict report_to_dict(const ScoreReport& report) {
  py::dict out;
  out["auc"] = report.auc;
  py::list entries;
  for (const auto& e : report.entries) {
    py::dict d;
    d["node"] = e.node;
    d["score"] = e.score;
    d["rank"] = e.rank;
    d["label"] = e.label;
    entries.append(d);
  }
  out["entries"] = entries;
  py::dict timings;
  for (const auto& [k, v] : report.timings_sec) timings[k.c_str()] = v;
  out["timings_sec"] = timings;
  return out;
}

}  // namespace

PYBIND11_MODULE(_eagle, m) {
  m.doc() = "Contrastive graph-autoencoder anomaly detection core";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<TrainingError>(m, "TrainingError");

  py::class_<HetGraph>(m, "HetGraph")
      .def("node_count",
           [](const HetGraph& g, const std::string& type) {
             return g.node_count(g.schema().node_type(type));
           })
      .def("total_node_count", &HetGraph::total_node_count)
      .def("total_edge_count", &HetGraph::total_edge_count)
      .def("node_types", [](const HetGraph& g) {
        std::vector<std::string> names;
        for (NodeTypeId t = 0; t < g.schema().node_type_count(); ++t) {
          names.push_back(g.schema().node_type_name(t));
        }
        return names;
      });

  py::class_<Checkpoint>(m, "Checkpoint");

  m.def("generate",
        [](const std::string& schema_json, std::uint64_t seed) {
          return generate_synthetic(parse_synth_schema(schema_json), seed);
        },
        py::arg("schema_json") = "{}", py::arg("seed") = 1);

  m.def("load_graph",
        [](const std::string& dir) { return load_graph(dir); });
  m.def("save_graph", [](const HetGraph& g, const std::string& dir) {
    save_graph(g, dir);
  });

  m.def("inject",
        [](const HetGraph& g, const std::string& type, std::size_t count,
           std::size_t k, std::uint64_t seed) {
          auto result =
              inject_contextual(g, g.schema().node_type(type), count, k, seed);
          auto labels = injection_labels(
              result.record, g.node_count(g.schema().node_type(type)));
          return py::make_tuple(std::move(result.graph), std::move(labels));
        },
        py::arg("graph"), py::arg("type"), py::arg("count"), py::arg("k") = 50,
        py::arg("seed") = 1);

  m.def("split",
        [](const HetGraph& g, double fraction, std::uint64_t seed) {
          auto s = split_graph(g, fraction, seed);
          return py::make_tuple(std::move(s.pretrain_graph),
                                std::move(s.finetune_graph));
        },
        py::arg("graph"), py::arg("fraction") = 0.3, py::arg("seed") = 1);

  m.def("pretrain",
        [](const std::string& config_json, const HetGraph& g) {
          return pretrain(parse_run_config(config_json), g, nullptr);
        },
        py::arg("config_json") = "{}", py::arg("graph"));

  m.def("detect",
        [](const std::string& config_json, const HetGraph& g,
           const std::vector<int>& labels,
           const std::optional<Checkpoint>& ckpt) {
          return report_to_dict(finetune_and_detect(
              parse_run_config(config_json), ckpt, g, labels, nullptr));
        },
        py::arg("config_json") = "{}", py::arg("graph"), py::arg("labels"),
        py::arg("checkpoint") = py::none());

  m.def("auc", &auc, py::arg("scores"), py::arg("labels"));
}
