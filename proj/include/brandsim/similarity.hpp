#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "brandsim/representation.hpp"

namespace brandsim {

enum class Measure { kPearson, kHistogramIntersection };

/// "p" or "hi".
const char* to_string(Measure measure);
Measure parse_measure(std::string_view name);

struct ExcludedBrand {
  std::string brand_id;
  std::string reason;

  bool operator==(const ExcludedBrand&) const = default;
};

/// Symmetric brand x brand similarity. Brands the measure is undefined for are
/// listed in `excluded` and absent from the grid.
struct SimilarityMatrix {
  std::vector<std::string> brands;
  std::vector<double> values;  // row-major
  Measure measure = Measure::kPearson;
  std::vector<ExcludedBrand> excluded;

  std::size_t size() const noexcept { return brands.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * brands.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * brands.size() + j]; }
  std::optional<std::size_t> index_of(std::string_view brand_id) const;
};

/// Correlation of two equal-length vectors (length >= 2). Throws kUndefined
/// if either vector is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Sum of component-wise minima of the two L1-normalized histograms. Throws
/// kUndefined for a histogram with zero mass.
double histogram_intersection(std::span<const double> h1, std::span<const double> h2);

/// All pairwise similarities. Histogram intersection requires histogram-kind
/// vectors. Brands with constant vectors (Pearson) or zero mass (intersection)
/// are excluded and reported; fewer than two remaining brands is an error.
SimilarityMatrix similarity_matrix(const std::vector<BrandVector>& vectors, Measure measure);

/// Same contract over raw rows, without the kind check.
SimilarityMatrix similarity_matrix(const std::vector<std::string>& brand_ids,
                                   const std::vector<std::vector<double>>& rows, Measure measure);

/// Sub-matrix on the listed brands (in the given order). Unknown brands are an error.
SimilarityMatrix restrict_to(const SimilarityMatrix& matrix, const std::vector<std::string>& brands);

/// Grid export: header `,b1,...,bn`, then `bi,v_i1,...,v_in`, six decimals.
void write_matrix_csv(const SimilarityMatrix& matrix, std::ostream& out);
/// Upper triangle as `brand_a,brand_b,similarity`.
void write_pairs_csv(const SimilarityMatrix& matrix, std::ostream& out);
SimilarityMatrix read_matrix_csv(std::istream& in, Measure measure);
SimilarityMatrix load_matrix_csv(const std::filesystem::path& path, Measure measure);

}  // namespace brandsim
