#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brandsim/brand_user_matrix.hpp"
#include "brandsim/codebook.hpp"
#include "brandsim/corpus.hpp"
#include "brandsim/representation.hpp"
#include "brandsim/similarity.hpp"
#include "brandsim/tag_ranking.hpp"
#include "brandsim/vector_table.hpp"

namespace brandsim {

/// One cell of the method grid plus everything needed to reproduce it.
struct PipelineConfig {
  std::filesystem::path corpus;
  std::filesystem::path tag_vectors;
  std::filesystem::path image_vectors;
  std::filesystem::path reference;
  ReferenceMode reference_mode = ReferenceMode::kCounts;

  FeatureMode mode = FeatureMode::kTag;
  RankingMethod ranking = RankingMethod::kFrequency;
  VectorKind repr = VectorKind::kHistogram;
  Measure measure = Measure::kHistogramIntersection;

  std::size_t k = 500;
  std::size_t top_n = 3000;
  std::size_t l = 1000;
  std::size_t batch_size = 1024;
  std::size_t iterations = 100;
  std::size_t posts_per_user = 10;
  std::size_t tag_dim = 100;
  std::size_t image_dim = 2048;
  TfMode tf_mode = TfMode::kNormalized;
  TagWeighting tag_weighting = TagWeighting::kUnweighted;
  std::uint64_t seed = 0;

  std::filesystem::path out;
};

FeatureMode parse_feature_mode(std::string_view name);    // image | tag
RankingMethod parse_ranking(std::string_view name);       // freq | score
VectorKind parse_vector_kind(std::string_view name);      // hist | avg
ReferenceMode parse_reference_mode(std::string_view name);  // counts | binary

/// Grid label, e.g. "tag-hist-freq-hi" or "image-avg-p".
std::string method_label(const PipelineConfig& config);

/// Throws kInvalidArgument for combinations outside the grid (intersection on
/// averaged vectors) and for non-positive sizes.
void check_config(const PipelineConfig& config);

std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& text);

/// The nine cells of the method grid for the given base configuration.
std::vector<PipelineConfig> method_grid(const PipelineConfig& base);

struct PipelineResult {
  std::vector<RankedTagList> rankings;  // tag mode only
  std::optional<Codebook> codebook;     // histogram representation only
  std::vector<BrandVector> vectors;
  SimilarityMatrix matrix;
};

/// ranking -> representation -> similarity on in-memory inputs. Only the
/// table for config.mode is required.
PipelineResult compute_similarity(const BrandCorpus& corpus, const VectorTable* tag_table,
                                  const VectorTable* image_table, const PipelineConfig& config);

struct RunOutputs {
  std::string label;
  std::vector<std::filesystem::path> files;
  PipelineResult result;
};

/// Loads and validates the inputs named in the config, runs the pipeline and
/// writes the matrix, brand vectors, codebook, metadata and resolved config
/// into config.out. Files created by a failed run are removed.
RunOutputs run_pipeline(const PipelineConfig& config);

}  // namespace brandsim
