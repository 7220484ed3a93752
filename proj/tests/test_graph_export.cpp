#include "brandsim/graph_export.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include "brandsim/error.hpp"

namespace brandsim {
namespace {

SimilarityMatrix three(Measure measure) {
  SimilarityMatrix m;
  m.brands = {"A", "B", "C"};
  m.measure = measure;
  m.values = {1, 0.9, 0.1, 0.9, 1, 0.5, 0.1, 0.5, 1};
  return m;
}

TEST(ExportVisualization, ThresholdFilters) {
  const auto g = export_visualization(three(Measure::kPearson), 0.4);
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"A", "B", "C"}));
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].a, "A");
  EXPECT_EQ(g.edges[0].b, "B");
  EXPECT_EQ(g.edges[1].a, "B");
  EXPECT_EQ(g.edges[1].b, "C");
  EXPECT_TRUE(g.warnings.empty());
}

TEST(ExportVisualization, ThresholdAboveMaximumWarns) {
  const auto g = export_visualization(three(Measure::kPearson), 0.95);
  EXPECT_TRUE(g.edges.empty());
  EXPECT_FALSE(g.warnings.empty());
}

TEST(ExportVisualization, ZeroOnIntersectionIsComplete) {
  const auto g = export_visualization(three(Measure::kHistogramIntersection), 0.0);
  EXPECT_EQ(g.edges.size(), 3u);
}

TEST(ExportVisualization, ThresholdOutsideRange) {
  EXPECT_THROW(export_visualization(three(Measure::kHistogramIntersection), -0.5), Error);
  EXPECT_THROW(export_visualization(three(Measure::kPearson), 1.5), Error);
  EXPECT_NO_THROW(export_visualization(three(Measure::kPearson), -0.5));
}

TEST(GraphJson, Shape) {
  const auto json = nlohmann::json::parse(graph_to_json(export_visualization(three(Measure::kPearson), 0.4)));
  ASSERT_EQ(json["nodes"].size(), 3u);
  EXPECT_EQ(json["nodes"][0]["id"], "A");
  ASSERT_EQ(json["edges"].size(), 2u);
  EXPECT_EQ(json["edges"][0]["a"], "A");
  EXPECT_DOUBLE_EQ(json["edges"][0]["weight"].get<double>(), 0.9);
}

}  // namespace
}  // namespace brandsim
