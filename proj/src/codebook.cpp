#include "brandsim/codebook.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/parallel.hpp"
#include "brandsim/representation.hpp"
#include "brandsim/rng.hpp"
#include "brandsim/vector_table.hpp"

namespace brandsim {
namespace {

template <typename T>
double squared_distance(std::span<const T> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sum += d * d;
  }
  return sum;
}

template <typename T>
std::size_t nearest(const Codebook& codebook, std::span<const T> v) {
  std::size_t best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codebook.k; ++c) {
    const double d = squared_distance(v, codebook.centroid(c));
    if (d < best_distance) {
      best_distance = d;
      best = c;
    }
  }
  return best;
}

template <typename T>
std::size_t checked_assign(const Codebook& codebook, std::span<const T> v) {
  if (v.size() != codebook.dim) {
    throw Error(ErrorKind::kDimension,
                fmt::format("vector has dimension {}, codebook expects {}", v.size(), codebook.dim));
  }
  if (codebook.k == 0) throw Error(ErrorKind::kInvalidArgument, "codebook is empty");
  return nearest(codebook, v);
}

std::vector<std::size_t> canonical_order(const PointSet& points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = points.row(a);
    const auto rb = points.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });
  return order;
}

void seed_centers(const PointSet& points, std::span<const std::size_t> sample, Rng& rng,
                  Codebook& codebook) {
  const std::size_t dim = points.dim();
  auto place = [&](std::size_t center, std::size_t point) {
    const auto row = points.row(point);
    std::copy(row.begin(), row.end(), codebook.centroids.begin() + static_cast<std::ptrdiff_t>(center * dim));
  };

  place(0, sample[rng.below(sample.size())]);
  std::vector<double> distance(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    distance[i] = squared_distance(points.row(sample[i]), codebook.centroid(0));
  }
  for (std::size_t c = 1; c < codebook.k; ++c) {
    place(c, sample[rng.weighted(distance)]);
    const auto center = codebook.centroid(c);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      distance[i] = std::min(distance[i], squared_distance(points.row(sample[i]), center));
    }
  }
}

}  // namespace

void PointSet::add(std::span<const float> point) {
  if (point.size() != dim_) {
    throw Error(ErrorKind::kDimension,
                fmt::format("point has dimension {}, expected {}", point.size(), dim_));
  }
  values_.insert(values_.end(), point.begin(), point.end());
}

Codebook build_codebook(const PointSet& points, const KMeansParams& params) {
  if (params.k < 1) throw Error(ErrorKind::kInvalidArgument, "K must be at least 1");
  if (params.batch_size < 1) throw Error(ErrorKind::kInvalidArgument, "batch_size must be positive");
  if (params.iterations < 1) throw Error(ErrorKind::kInvalidArgument, "iterations must be positive");
  if (points.size() < params.k) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("{} vectors are fewer than K={}", points.size(), params.k));
  }

  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  Codebook codebook{params.k, dim, std::vector<double>(params.k * dim, 0.0), params};

  Rng rng(params.seed);
  std::vector<std::size_t> order = canonical_order(points);
  rng.shuffle(order);

  const std::size_t init_size = std::min(n, std::max(3 * params.batch_size, 3 * params.k));
  seed_centers(points, std::span(order).first(init_size), rng, codebook);

  std::vector<std::size_t> counts(params.k, 0);
  std::vector<std::size_t> assignment(params.batch_size);
  for (std::size_t epoch = 0; epoch < params.iterations; ++epoch) {
    if (epoch > 0) rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += params.batch_size) {
      const std::size_t len = std::min(params.batch_size, n - start);
      parallel_for(len, [&](std::size_t i) {
        assignment[i] = nearest(codebook, points.row(order[start + i]));
      });
      for (std::size_t i = 0; i < len; ++i) {
        const std::size_t c = assignment[i];
        const double rate = 1.0 / static_cast<double>(++counts[c]);
        const auto x = points.row(order[start + i]);
        double* center = codebook.centroids.data() + c * dim;
        for (std::size_t d = 0; d < dim; ++d) center[d] += rate * (static_cast<double>(x[d]) - center[d]);
      }
    }
  }
  return codebook;
}

std::size_t assign_cluster(const Codebook& codebook, std::span<const float> v) {
  return checked_assign(codebook, v);
}

std::size_t assign_cluster(const Codebook& codebook, std::span<const double> v) {
  return checked_assign(codebook, v);
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& prefix) {
  VectorTable table(codebook.dim);
  std::vector<float> row(codebook.dim);
  for (std::size_t c = 0; c < codebook.k; ++c) {
    const auto centroid = codebook.centroid(c);
    std::transform(centroid.begin(), centroid.end(), row.begin(),
                   [](double v) { return static_cast<float>(v); });
    table.add(fmt::format("c{}", c), row);
  }
  auto bin = prefix;
  bin += ".bin";
  save_vectors(table, bin, VectorFormat::kBinary);

  auto meta = prefix;
  meta += ".meta";
  save_metadata({{"kind", "codebook"},
                 {"k", std::to_string(codebook.k)},
                 {"dim", std::to_string(codebook.dim)},
                 {"seed", std::to_string(codebook.params.seed)},
                 {"batch_size", std::to_string(codebook.params.batch_size)},
                 {"iterations", std::to_string(codebook.params.iterations)},
                 {"init", "k-means++"}},
                meta);
}

Codebook load_codebook(const std::filesystem::path& prefix) {
  auto meta_path = prefix;
  meta_path += ".meta";
  const auto meta = load_metadata(meta_path);
  auto field = [&](const char* key) -> std::uint64_t {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw Error(ErrorKind::kParse, fmt::format("{}: missing key '{}'", meta_path.string(), key));
    }
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, fmt::format("{}: bad value for '{}'", meta_path.string(), key));
    }
  };

  Codebook codebook;
  codebook.k = field("k");
  codebook.dim = field("dim");
  codebook.params = {codebook.k, field("seed"), field("batch_size"), field("iterations")};

  auto bin = prefix;
  bin += ".bin";
  const auto table = load_vectors(bin, codebook.dim);
  if (table.size() != codebook.k) {
    throw Error(ErrorKind::kValidation,
                fmt::format("codebook has {} centroids, metadata says {}", table.size(), codebook.k));
  }
  codebook.centroids.reserve(codebook.k * codebook.dim);
  for (std::size_t c = 0; c < codebook.k; ++c) {
    for (float v : table.row(c)) codebook.centroids.push_back(v);
  }
  return codebook;
}

}  // namespace brandsim
