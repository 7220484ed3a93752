#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace brandsim {

/// Row-major collection of points sharing one dimension.
class PointSet {
 public:
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  void add(std::span<const float> point);
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }

 private:
  std::size_t dim_;
  std::vector<float> values_;
};

struct KMeansParams {
  std::size_t k = 500;
  std::uint64_t seed = 0;
  std::size_t batch_size = 1024;
  std::size_t iterations = 100;  // passes over the (reshuffled) pool
};

struct Codebook {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<double> centroids;  // row-major k x dim
  KMeansParams params;

  std::span<const double> centroid(std::size_t i) const {
    return {centroids.data() + i * dim, dim};
  }
};

/// Mini-batch k-means.
///
/// The pool is first put into a canonical (lexicographic) order and then
/// shuffled from the seed, so the result depends only on the multiset of
/// points and the parameters. Centers start from k-means++ seeding on an
/// initial sample of max(3 * batch_size, 3 * k) points. Each center keeps an
/// assignment count and moves toward each assigned point with rate 1/count.
/// Centers that never receive a point keep their seeded position.
Codebook build_codebook(const PointSet& points, const KMeansParams& params);

/// Nearest centroid by squared Euclidean distance; ties go to the lower index.
std::size_t assign_cluster(const Codebook& codebook, std::span<const float> v);
std::size_t assign_cluster(const Codebook& codebook, std::span<const double> v);

/// `<prefix>.bin` holds the centroids in the binary vector format (ids c0..cK-1),
/// `<prefix>.meta` the key=value parameters.
void save_codebook(const Codebook& codebook, const std::filesystem::path& prefix);
Codebook load_codebook(const std::filesystem::path& prefix);

}  // namespace brandsim
