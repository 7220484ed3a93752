#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "brandsim/corpus.hpp"

namespace brandsim {

/// n(tag, brand): number of distinct followers of the brand who used the tag
/// in at least one post.
struct TagCountMap {
  std::string brand_id;
  std::map<std::string, std::int64_t> counts;
};

using TagValueMap = std::map<std::string, double>;

enum class RankingMethod { kFrequency, kScore };

/// kNormalized: tf(i) = n_i / sum_k n_k.
/// kLiteral: tf(i) = sum_k n_i / n_k, kept for comparison runs.
enum class TfMode { kNormalized, kLiteral };

struct RankedTag {
  std::string tag;
  double value = 0.0;

  bool operator==(const RankedTag&) const = default;
};

/// Descending value, ties by ascending tag.
struct RankedTagList {
  std::string brand_id;
  RankingMethod method = RankingMethod::kFrequency;
  std::vector<RankedTag> entries;

  bool operator==(const RankedTagList&) const = default;
};

struct RankingOptions {
  RankingMethod method = RankingMethod::kFrequency;
  std::size_t top_n = 3000;
  std::size_t l = 1000;  // top-l cutoff used for document frequency
  TfMode tf_mode = TfMode::kNormalized;
};

const char* to_string(RankingMethod method);

TagCountMap user_frequency(const BrandCorpus& corpus, std::string_view brand_id);

/// Full frequency ordering of a brand's tags (descending count, ascending tag).
std::vector<RankedTag> frequency_order(const TagCountMap& counts);

TagValueMap term_frequency(const TagCountMap& counts, TfMode mode = TfMode::kNormalized);

/// idf(i) = ln(B / max(1, docs(i))) + 1 where docs(i) counts brands whose
/// frequency ordering places i within the first l positions.
TagValueMap inverse_document_frequency(const BrandCorpus& corpus, std::size_t l);
TagValueMap inverse_document_frequency(const std::vector<TagCountMap>& per_brand,
                                       std::size_t brand_count, std::size_t l);

/// score(i) = tf(i) * idf(i).
TagValueMap tag_score(const TagValueMap& tf, const TagValueMap& idf);

RankedTagList rank_tags(const BrandCorpus& corpus, std::string_view brand_id,
                        const RankingOptions& options);

/// Rankings for every brand, in corpus brand order. Document frequencies are
/// computed once and shared.
std::vector<RankedTagList> rank_all_brands(const BrandCorpus& corpus,
                                           const RankingOptions& options);

/// `rank,tag,value` with header; rank is 1-based.
void write_ranked_csv(const RankedTagList& list, std::ostream& out);

}  // namespace brandsim
