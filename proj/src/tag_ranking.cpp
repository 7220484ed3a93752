#include "brandsim/tag_ranking.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/parallel.hpp"

namespace brandsim {
namespace {

bool ranks_before(const RankedTag& a, const RankedTag& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.tag < b.tag;
}

TagCountMap count_users(const Brand& brand) {
  TagCountMap out{brand.id, {}};
  std::unordered_set<std::string_view> used;
  for (const auto& follower : brand.followers) {
    used.clear();
    for (const auto& post : follower.posts) used.insert(post.tags.begin(), post.tags.end());
    for (auto tag : used) ++out.counts[std::string(tag)];
  }
  return out;
}

std::vector<RankedTag> top_entries(std::vector<RankedTag> entries, std::size_t top_n) {
  const auto keep = std::min(top_n, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep),
                    entries.end(), ranks_before);
  entries.resize(keep);
  return entries;
}

void check_options(const RankingOptions& options) {
  if (options.top_n == 0) throw Error(ErrorKind::kInvalidArgument, "top_n must be positive");
  if (options.l == 0) throw Error(ErrorKind::kInvalidArgument, "l must be positive");
}

RankedTagList rank_with(const TagCountMap& counts, const TagValueMap* idf,
                        const RankingOptions& options) {
  RankedTagList list{counts.brand_id, options.method, {}};
  std::vector<RankedTag> entries;
  entries.reserve(counts.counts.size());
  if (options.method == RankingMethod::kFrequency) {
    for (const auto& [tag, n] : counts.counts) entries.push_back({tag, static_cast<double>(n)});
  } else if (!counts.counts.empty()) {
    for (auto& [tag, score] : tag_score(term_frequency(counts, options.tf_mode), *idf)) {
      entries.push_back({tag, score});
    }
  }
  list.entries = top_entries(std::move(entries), options.top_n);
  return list;
}

}  // namespace

const char* to_string(RankingMethod method) {
  return method == RankingMethod::kFrequency ? "freq" : "score";
}

TagCountMap user_frequency(const BrandCorpus& corpus, std::string_view brand_id) {
  return count_users(corpus.brand(brand_id));
}

std::vector<RankedTag> frequency_order(const TagCountMap& counts) {
  std::vector<RankedTag> entries;
  entries.reserve(counts.counts.size());
  for (const auto& [tag, n] : counts.counts) entries.push_back({tag, static_cast<double>(n)});
  std::sort(entries.begin(), entries.end(), ranks_before);
  return entries;
}

TagValueMap term_frequency(const TagCountMap& counts, TfMode mode) {
  if (counts.counts.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("no tags for brand '{}'", counts.brand_id));
  }
  TagValueMap tf;
  if (mode == TfMode::kNormalized) {
    double total = 0.0;
    for (const auto& [tag, n] : counts.counts) total += static_cast<double>(n);
    for (const auto& [tag, n] : counts.counts) tf.emplace(tag, static_cast<double>(n) / total);
  } else {
    double inverse_sum = 0.0;
    for (const auto& [tag, n] : counts.counts) inverse_sum += 1.0 / static_cast<double>(n);
    for (const auto& [tag, n] : counts.counts) {
      tf.emplace(tag, static_cast<double>(n) * inverse_sum);
    }
  }
  return tf;
}

TagValueMap inverse_document_frequency(const std::vector<TagCountMap>& per_brand,
                                       std::size_t brand_count, std::size_t l) {
  if (l == 0) throw Error(ErrorKind::kInvalidArgument, "l must be positive");
  if (brand_count == 0) throw Error(ErrorKind::kInvalidArgument, "corpus has no brands");

  std::map<std::string, std::size_t> docs;
  for (const auto& counts : per_brand) {
    const auto order = frequency_order(counts);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      auto& d = docs[order[rank].tag];
      if (rank < l) ++d;
    }
  }

  TagValueMap idf;
  const double b = static_cast<double>(brand_count);
  for (const auto& [tag, d] : docs) {
    idf.emplace(tag, std::log(b / static_cast<double>(std::max<std::size_t>(1, d))) + 1.0);
  }
  return idf;
}

TagValueMap inverse_document_frequency(const BrandCorpus& corpus, std::size_t l) {
  std::vector<TagCountMap> per_brand;
  per_brand.reserve(corpus.brand_count());
  for (const auto& brand : corpus.brands()) per_brand.push_back(count_users(brand));
  return inverse_document_frequency(per_brand, corpus.brand_count(), l);
}

TagValueMap tag_score(const TagValueMap& tf, const TagValueMap& idf) {
  TagValueMap score;
  for (const auto& [tag, t] : tf) {
    auto it = idf.find(tag);
    if (it == idf.end()) {
      throw Error(ErrorKind::kInvalidArgument, fmt::format("no idf value for tag '{}'", tag));
    }
    if (t > 0.0) score.emplace(tag, t * it->second);
  }
  return score;
}

RankedTagList rank_tags(const BrandCorpus& corpus, std::string_view brand_id,
                        const RankingOptions& options) {
  check_options(options);
  const auto counts = user_frequency(corpus, brand_id);
  if (options.method == RankingMethod::kFrequency) return rank_with(counts, nullptr, options);
  const auto idf = inverse_document_frequency(corpus, options.l);
  return rank_with(counts, &idf, options);
}

std::vector<RankedTagList> rank_all_brands(const BrandCorpus& corpus,
                                           const RankingOptions& options) {
  check_options(options);
  const auto& brands = corpus.brands();
  std::vector<TagCountMap> counts(brands.size());
  parallel_for(brands.size(), [&](std::size_t i) { counts[i] = count_users(brands[i]); });

  TagValueMap idf;
  if (options.method == RankingMethod::kScore) {
    idf = inverse_document_frequency(counts, brands.size(), options.l);
  }
  std::vector<RankedTagList> out(brands.size());
  parallel_for(brands.size(), [&](std::size_t i) { out[i] = rank_with(counts[i], &idf, options); });
  return out;
}

void write_ranked_csv(const RankedTagList& list, std::ostream& out) {
  out << "rank,tag,value\n";
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    out << fmt::format("{},{},{}\n", i + 1, list.entries[i].tag, list.entries[i].value);
  }
}

}  // namespace brandsim
