#pragma once

#include <string>
#include <vector>

#include "brandsim/similarity.hpp"

namespace brandsim {

struct GraphEdge {
  std::string a;
  std::string b;
  double weight = 0.0;
};

struct BrandGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::string> warnings;
};

/// Undirected brand graph with an edge for every pair whose similarity is at
/// least `threshold`. The threshold must lie in the measure's range.
BrandGraph export_visualization(const SimilarityMatrix& matrix, double threshold);

/// {"nodes":[{"id":..}],"edges":[{"a":..,"b":..,"weight":..}]}
std::string graph_to_json(const BrandGraph& graph);

}  // namespace brandsim
