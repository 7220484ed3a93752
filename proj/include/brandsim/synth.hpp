#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "brandsim/corpus.hpp"
#include "brandsim/representation.hpp"
#include "brandsim/similarity.hpp"
#include "brandsim/vector_table.hpp"

namespace brandsim {

/// Generator settings. Brand b belongs to group b % groups.
///
/// Each post draws `tags_per_post` distinct tags: with probability
/// `background_fraction` from a shared background vocabulary, otherwise from
/// the group core (probability `within_group_tag_overlap`) or from the
/// brand's own tags. Pools are Zipf-weighted. `affinity_spread` grades the
/// brands of a group: their core probability steps evenly from the overlap
/// down to overlap * (1 - spread), so within-group pairs are not all alike. Core tag embeddings sit near a
/// per-group center; images are drawn around the group's style centers with
/// probability `within_group_tag_overlap`, otherwise around shared background
/// styles. `noise` is the standard deviation of all vector perturbations.
struct SynthConfig {
  std::size_t brands = 8;
  std::size_t groups = 2;
  std::size_t followers_per_brand = 200;
  std::size_t posts_per_user = 10;
  std::size_t tags_per_post = 5;
  std::size_t tag_vocab = 2000;
  std::size_t core_tags_per_group = 60;
  std::size_t brand_tags = 40;
  std::size_t tag_dim = 100;
  std::size_t image_dim = 64;
  std::size_t styles_per_group = 4;
  std::size_t background_styles = 4;
  double within_group_tag_overlap = 0.8;
  double affinity_spread = 0.5;
  double background_fraction = 0.1;
  double zipf_exponent = 0.7;
  double noise = 0.3;
  std::uint64_t seed = 1;
};

struct GroundTruth {
  std::vector<std::string> brands;
  std::vector<std::size_t> group;  // parallel to brands
  std::vector<double> affinity;    // probability of drawing from the group core

  bool operator==(const GroundTruth&) const = default;
};

struct SyntheticData {
  BrandCorpus corpus;
  VectorTable tag_vectors;
  VectorTable image_vectors;
  GroundTruth truth;
};

/// Throws kInvalidArgument for infeasible settings (vocabulary too small for
/// the pools, overlap outside [0,1], more groups than brands).
SyntheticData generate_synthetic_corpus(const SynthConfig& config);

/// Writes posts.jsonl, tag_vectors.txt, image_vectors.bin and groups.csv.
std::vector<std::filesystem::path> save_synthetic(const SyntheticData& data,
                                                  const std::filesystem::path& dir);

/// Naive double-loop transcription of the similarity formulas, kept apart from
/// the optimized path so each can check the other.
SimilarityMatrix brute_force_similarity_oracle(const std::vector<BrandVector>& vectors,
                                               Measure measure);

/// Mean similarity over brand pairs in the same group and in different groups.
struct GroupContrast {
  double within = 0.0;
  double across = 0.0;
};
GroupContrast group_contrast(const SimilarityMatrix& matrix, const GroundTruth& truth);

}  // namespace brandsim
