#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brandsim/codebook.hpp"
#include "brandsim/corpus.hpp"
#include "brandsim/tag_ranking.hpp"
#include "brandsim/vector_table.hpp"

namespace brandsim {

enum class FeatureMode { kImage, kTag };
enum class VectorKind { kHistogram, kAverage };

/// How a selected tag contributes to its histogram bin: once, or by the
/// number of followers who used it.
enum class TagWeighting { kUnweighted, kUserCount };

const char* to_string(FeatureMode mode);
const char* to_string(VectorKind kind);

struct BrandVector {
  std::string brand_id;
  VectorKind kind = VectorKind::kHistogram;
  std::vector<double> values;
  std::size_t item_count = 0;

  bool operator==(const BrandVector&) const = default;
};

/// The feature vectors that stand for one brand.
struct BrandItems {
  std::string brand_id;
  std::vector<std::string_view> ids;        // image_vector_id or tag
  std::vector<std::span<const float>> vectors;
  std::vector<double> weights;              // 1 unless kUserCount weighting
};

struct RepresentationInputs {
  FeatureMode mode = FeatureMode::kTag;
  const VectorTable* table = nullptr;                  // image or tag embeddings
  const std::vector<RankedTagList>* rankings = nullptr;  // tag mode, corpus brand order
  TagWeighting weighting = TagWeighting::kUnweighted;
};

/// Image mode: every post image of the brand's followers found in the table.
/// Tag mode: every ranked tag of the brand that has an embedding. Items
/// without a vector are skipped. The returned views point into the table.
std::vector<BrandItems> collect_brand_items(const BrandCorpus& corpus,
                                            const RepresentationInputs& inputs);

/// Codebook training pool: distinct item vectors across brands, by id.
PointSet training_pool(const std::vector<BrandItems>& items);

std::vector<BrandVector> histogram_representation(const std::vector<BrandItems>& items,
                                                  const Codebook& codebook);
std::vector<BrandVector> histogram_representation(const BrandCorpus& corpus,
                                                  const Codebook& codebook,
                                                  const RepresentationInputs& inputs);

/// Component-wise mean of each brand's item vectors. Throws kUndefined for a
/// brand without any representable item.
std::vector<BrandVector> average_representation(const std::vector<BrandItems>& items);
std::vector<BrandVector> average_representation(const BrandCorpus& corpus,
                                                const RepresentationInputs& inputs);

using Metadata = std::map<std::string, std::string>;

void save_metadata(const Metadata& meta, const std::filesystem::path& path);
Metadata load_metadata(const std::filesystem::path& path);

/// `<prefix>.bin` (binary vector format, brand ids as record ids) plus
/// `<prefix>.meta`; `extra` entries are added to the sidecar.
void save_brand_vectors(const std::vector<BrandVector>& vectors,
                        const std::filesystem::path& prefix, const Metadata& extra = {});
std::vector<BrandVector> load_brand_vectors(const std::filesystem::path& prefix);

}  // namespace brandsim
