// Python bindings for the core operations: instance I/O, the seven solvers,
// feature extraction, instance generation, and trained-model prediction.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mcfsel/dimacs.hpp"
#include "mcfsel/features.hpp"
#include "mcfsel/generators.hpp"
#include "mcfsel/learn.hpp"
#include "mcfsel/solvers.hpp"

namespace py = pybind11;
using namespace mcfsel;

namespace {

AlgorithmId algorithm_or_throw(const std::string& name) {
  const auto id = algorithm_from_name(name);
  if (!id) throw py::value_error("unknown algorithm: " + name);
  return *id;
}

GeneratorParams params_from_kwargs(const std::string& family, std::int64_t num_vertices,
                                   std::int64_t num_arcs, std::int64_t total_supply,
                                   std::int64_t supply_vertices, std::int64_t demand_vertices,
                                   std::int64_t max_cost, std::int64_t max_capacity,
                                   std::int64_t grid_width, std::int64_t grid_length,
                                   bool two_way_arcs, std::uint64_t seed) {
  const auto generator = generator_from_name(family);
  if (!generator) throw py::value_error("unknown generator family: " + family);
  GeneratorParams p;
  p.generator = *generator;
  p.num_vertices = num_vertices;
  p.num_arcs = num_arcs;
  p.total_supply = total_supply;
  p.num_supply_vertices = supply_vertices;
  p.num_demand_vertices = demand_vertices;
  p.max_cost = max_cost;
  p.max_capacity = max_capacity;
  p.grid_width = grid_width;
  p.grid_length = grid_length;
  p.two_way_arcs = two_way_arcs;
  p.seed = seed;
  return p;
}

FeatureVector features_from_list(const std::vector<double>& values) {
  if (values.size() != kNumFeatures) {
    throw py::value_error("feature vector must have exactly 21 entries");
  }
  FeatureVector f;
  std::copy(values.begin(), values.end(), f.begin());
  return f;
}

}  // namespace

PYBIND11_MODULE(mcfsel, m) {
  m.doc() = "minimum-cost-flow solver portfolio with learned algorithm selection";

  py::class_<Instance>(m, "Instance")
      .def(py::init([](Vertex num_vertices,
                       const std::vector<std::tuple<Vertex, Vertex, std::int64_t, std::int64_t>>&
                           arcs,
                       const std::vector<std::int64_t>& supplies) {
             std::vector<Arc> converted;
             converted.reserve(arcs.size());
             for (const auto& [tail, head, cost, capacity] : arcs) {
               converted.push_back({tail, head, cost, capacity});
             }
             return Instance(num_vertices, std::move(converted), supplies);
           }),
           py::arg("num_vertices"), py::arg("arcs"), py::arg("supplies"),
           "arcs are (tail, head, cost, capacity) tuples with 0-based vertex ids")
      .def_property_readonly("num_vertices", &Instance::num_vertices)
      .def_property_readonly("num_arcs", &Instance::num_arcs)
      .def_property_readonly("supplies", &Instance::supplies)
      .def_property_readonly("arcs",
                             [](const Instance& inst) {
                               std::vector<std::tuple<Vertex, Vertex, std::int64_t, std::int64_t>>
                                   out;
                               out.reserve(inst.arcs().size());
                               for (const Arc& a : inst.arcs()) {
                                 out.emplace_back(a.tail, a.head, a.cost, a.capacity);
                               }
                               return out;
                             })
      .def("__eq__", [](const Instance& a, const Instance& b) { return a == b; })
      .def("__repr__", [](const Instance& inst) {
        std::ostringstream out;
        out << "Instance(n=" << inst.num_vertices() << ", m=" << inst.num_arcs() << ")";
        return out.str();
      });

  m.def("parse_dimacs", [](const std::string& text) { return parse_dimacs(text); },
        py::arg("text"));
  m.def("write_dimacs", &write_dimacs, py::arg("instance"));
  m.def("read_dimacs_file", &read_dimacs_file, py::arg("path"));

  m.def("algorithms", [] {
    std::vector<std::string> names;
    for (AlgorithmId id : all_algorithms()) names.push_back(algorithm_name(id));
    return names;
  });

  m.def(
      "solve",
      [](const Instance& instance, const std::string& algorithm) {
        const SolveResult result = solve(algorithm_or_throw(algorithm), instance);
        py::dict out;
        out["status"] = result.status == SolveStatus::Optimal ? "Optimal" : "Infeasible";
        out["iterations"] = result.iterations;
        if (result.status == SolveStatus::Optimal) {
          out["cost"] = result.cost;
          out["flow"] = result.flow;
        }
        return out;
      },
      py::arg("instance"), py::arg("algorithm"),
      "run one of SCC, MMCC, CAT, SSP, CAS, NS, CS2 on the instance");

  m.def(
      "certify_optimal",
      [](const Instance& instance, const Flow& flow) { return certify_optimal(instance, flow); },
      py::arg("instance"), py::arg("flow"),
      "true iff the feasible flow admits no negative residual cycle");

  m.def("feature_names", [] {
    return std::vector<std::string>(feature_names().begin(), feature_names().end());
  });
  m.def(
      "extract_features",
      [](const Instance& instance) {
        const FeatureVector f = extract_features(instance);
        return std::vector<double>(f.begin(), f.end());
      },
      py::arg("instance"));

  m.def("generate", [](const std::string& family, std::int64_t num_vertices,
                       std::int64_t num_arcs, std::int64_t total_supply,
                       std::int64_t supply_vertices, std::int64_t demand_vertices,
                       std::int64_t max_cost, std::int64_t max_capacity,
                       std::int64_t grid_width, std::int64_t grid_length, bool two_way_arcs,
                       std::uint64_t seed) {
          return generate(params_from_kwargs(family, num_vertices, num_arcs, total_supply,
                                             supply_vertices, demand_vertices, max_cost,
                                             max_capacity, grid_width, grid_length, two_way_arcs,
                                             seed));
        },
        py::arg("family"), py::arg("num_vertices") = 0, py::arg("num_arcs") = 0,
        py::arg("total_supply") = 0, py::arg("supply_vertices") = 1,
        py::arg("demand_vertices") = 1, py::arg("max_cost") = 100,
        py::arg("max_capacity") = 100, py::arg("grid_width") = 0, py::arg("grid_length") = 0,
        py::arg("two_way_arcs") = false, py::arg("seed") = 0,
        "deterministic instance from one of netgen, gridgen, gridgraph, goto");

  m.def("parameter_grid_size", [](const std::string& family) {
    const auto generator = generator_from_name(family);
    if (!generator) throw py::value_error("unknown generator family: " + family);
    return parameter_grid(*generator).size();
  });

  py::class_<ModelArtifact>(m, "Model")
      .def_property_readonly("family",
                             [](const ModelArtifact& model) { return family_name(model.family); })
      .def_property_readonly("hyperparameters",
                             [](const ModelArtifact& model) { return model.hyperparameters; })
      .def(
          "predict",
          [](const ModelArtifact& model, const std::vector<double>& features) {
            return algorithm_name(predict(model, features_from_list(features)));
          },
          py::arg("features"))
      .def("save", &save_model, py::arg("path"))
      .def("to_json", &serialize_model);

  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "fit",
      [](const std::string& family, const std::vector<std::vector<double>>& features,
         const std::vector<std::string>& labels,
         const std::map<std::string, std::string>& hyperparameters, std::uint64_t seed) {
        const auto f = family_from_name(family);
        if (!f) throw py::value_error("unknown model family: " + family);
        if (features.size() != labels.size()) {
          throw py::value_error("features and labels must have the same length");
        }
        Dataset train;
        for (std::size_t i = 0; i < features.size(); ++i) {
          LabeledSample sample;
          sample.features = features_from_list(features[i]);
          sample.label = algorithm_or_throw(labels[i]);
          train.push_back(std::move(sample));
        }
        return fit(*f, train, hyperparameters, seed);
      },
      py::arg("family"), py::arg("features"), py::arg("labels"), py::arg("hyperparameters"),
      py::arg("seed") = 1,
      "train one of knn, decision_tree, random_forest, adaboost");
}
