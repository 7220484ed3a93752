#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brandsim/brand_user_matrix.hpp"
#include "brandsim/corpus.hpp"
#include "brandsim/pipeline.hpp"
#include "brandsim/similarity.hpp"

namespace brandsim {

/// Pearson between brand rows of a brand x user matrix.
SimilarityMatrix reference_similarity(const BrandUserMatrix& matrix);

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws kUndefined for a constant input.
double spearman(std::span<const double> x, std::span<const double> y);

enum class ComparisonScope {
  kGlobal,    // one coefficient over all upper-triangle pairs
  kPerBrand,  // mean of per-brand row coefficients
};

struct ComparisonOptions {
  std::string method_name = "a";
  std::string reference_name = "b";
  std::optional<std::vector<std::string>> brand_filter;
  ComparisonScope scope = ComparisonScope::kGlobal;
};

struct ComparisonResult {
  std::string method_name;
  std::string reference_name;
  double rho = 0.0;
  std::size_t pairs_used = 0;
  std::vector<std::string> excluded_brands;
};

/// Spearman agreement of two matrices on their common brands (at least three).
ComparisonResult compare_similarities(const SimilarityMatrix& a, const SimilarityMatrix& b,
                                      const ComparisonOptions& options = {});

struct StabilityResult {
  std::size_t repeats = 0;
  std::vector<double> per_repeat_rho;
  double mean_rho = 0.0;
};

/// Per repeat, splits every brand's followers at random into halves of sizes
/// ceil(n/2) and floor(n/2), runs the pipeline on each half with the config's
/// seed and compares the two matrices. All sampling derives from `seed`.
StabilityResult split_half_stability(const BrandCorpus& corpus, const VectorTable* tag_table,
                                     const VectorTable* image_table, const PipelineConfig& config,
                                     std::size_t repeats, std::uint64_t seed);

/// Per repeat, samples m followers of every brand, runs the pipeline and
/// compares with the matrix of the full corpus.
StabilityResult subsample_stability(const BrandCorpus& corpus, const VectorTable* tag_table,
                                    const VectorTable* image_table, const PipelineConfig& config,
                                    std::size_t m, std::size_t repeats, std::uint64_t seed);

/// Splits each brand's followers into two halves with a seeded shuffle.
std::pair<BrandCorpus, BrandCorpus> split_followers(const BrandCorpus& corpus, std::uint64_t seed);
/// Keeps m randomly chosen followers per brand (original order preserved).
BrandCorpus sample_followers(const BrandCorpus& corpus, std::size_t m, std::uint64_t seed);

void write_comparison_table(const std::vector<ComparisonResult>& results, std::ostream& out);
/// One JSON object per result: method, reference, rho, pairs_used, excluded_brands
/// plus the given parameters and seed.
std::string comparison_json(const std::vector<ComparisonResult>& results,
                            const PipelineConfig& config);

std::string stability_json(const std::string& protocol, const StabilityResult& result,
                           const PipelineConfig& config, std::uint64_t seed,
                           std::optional<std::size_t> m = std::nullopt);

}  // namespace brandsim
