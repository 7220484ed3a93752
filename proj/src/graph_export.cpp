#include "brandsim/graph_export.hpp"

#include <algorithm>

#include <fmt/core.h>
#include <json.hpp>

#include "brandsim/error.hpp"

namespace brandsim {

BrandGraph export_visualization(const SimilarityMatrix& matrix, double threshold) {
  const double lo = matrix.measure == Measure::kPearson ? -1.0 : 0.0;
  if (!(threshold >= lo && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("threshold {} outside [{}, 1] for measure '{}'", threshold, lo,
                            to_string(matrix.measure)));
  }
  BrandGraph graph;
  graph.nodes = matrix.brands;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.size(); ++j) {
      if (matrix.at(i, j) >= threshold) {
        graph.edges.push_back({matrix.brands[i], matrix.brands[j], matrix.at(i, j)});
      }
    }
  }
  if (graph.edges.empty()) {
    graph.warnings.push_back(fmt::format("threshold {} leaves no edges", threshold));
  }
  return graph;
}

std::string graph_to_json(const BrandGraph& graph) {
  nlohmann::ordered_json doc;
  doc["nodes"] = nlohmann::ordered_json::array();
  for (const auto& id : graph.nodes) doc["nodes"].push_back({{"id", id}});
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : graph.edges) {
    doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"weight", e.weight}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace brandsim
