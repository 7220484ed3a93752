#include "brandsim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/rng.hpp"

namespace brandsim {
namespace {

void check_config(const SynthConfig& c) {
  auto fail = [](const std::string& message) {
    throw Error(ErrorKind::kInvalidArgument, "infeasible synthetic config: " + message);
  };
  if (c.brands == 0 || c.groups == 0) fail("brands and groups must be positive");
  if (c.groups > c.brands) fail(fmt::format("{} groups for {} brands", c.groups, c.brands));
  if (c.followers_per_brand == 0 || c.posts_per_user == 0) fail("followers and posts must be positive");
  if (c.tags_per_post == 0) fail("tags_per_post must be positive");
  if (c.tag_dim == 0 || c.image_dim == 0) fail("vector dimensions must be positive");
  if (c.styles_per_group == 0 || c.background_styles == 0) fail("style counts must be positive");
  if (!(c.within_group_tag_overlap >= 0.0 && c.within_group_tag_overlap <= 1.0)) {
    fail("within_group_tag_overlap outside [0,1]");
  }
  if (!(c.affinity_spread >= 0.0 && c.affinity_spread <= 1.0)) fail("affinity_spread outside [0,1]");
  if (!(c.background_fraction >= 0.0 && c.background_fraction <= 1.0)) {
    fail("background_fraction outside [0,1]");
  }
  if (!(c.noise >= 0.0) || !(c.zipf_exponent >= 0.0)) fail("noise and zipf_exponent must be >= 0");
  if (c.core_tags_per_group < c.tags_per_post || c.brand_tags < c.tags_per_post) {
    fail("core and brand tag pools must each hold at least tags_per_post tags");
  }
  const std::size_t reserved = c.groups * c.core_tags_per_group + c.brands * c.brand_tags;
  if (c.tag_vocab < reserved + c.tags_per_post) {
    fail(fmt::format("tag_vocab {} too small: pools need {} plus {} background tags", c.tag_vocab,
                     reserved, c.tags_per_post));
  }
}

std::vector<double> zipf_weights(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), exponent);
  return w;
}

std::vector<float> gaussian_vector(Rng& rng, std::size_t dim, double scale) {
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(scale * rng.normal());
  return v;
}

std::vector<float> perturbed(Rng& rng, const std::vector<float>& center, double noise) {
  std::vector<float> v(center.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = static_cast<float>(center[i] + noise * rng.normal());
  }
  return v;
}

constexpr double kCenterScale = 3.0;

}  // namespace

SyntheticData generate_synthetic_corpus(const SynthConfig& c) {
  check_config(c);
  Rng rng(c.seed);

  const std::size_t core_begin = 0;
  const std::size_t brand_begin = c.groups * c.core_tags_per_group;
  const std::size_t background_begin = brand_begin + c.brands * c.brand_tags;
  const std::size_t background_size = c.tag_vocab - background_begin;
  const int width = static_cast<int>(std::to_string(c.tag_vocab - 1).size());
  auto tag_name = [&](std::size_t i) { return fmt::format("tag{:0{}}", i, width); };

  // Tag embeddings: core tags near their group's center, the rest scattered.
  VectorTable tag_vectors(c.tag_dim);
  {
    std::vector<std::vector<float>> group_centers;
    for (std::size_t g = 0; g < c.groups; ++g) {
      group_centers.push_back(gaussian_vector(rng, c.tag_dim, kCenterScale));
    }
    for (std::size_t t = 0; t < c.tag_vocab; ++t) {
      const auto v = t < brand_begin
                         ? perturbed(rng, group_centers[(t - core_begin) / c.core_tags_per_group], c.noise)
                         : gaussian_vector(rng, c.tag_dim, kCenterScale);
      tag_vectors.add(tag_name(t), v);
    }
  }

  std::vector<std::vector<float>> group_styles;  // groups * styles_per_group
  for (std::size_t s = 0; s < c.groups * c.styles_per_group; ++s) {
    group_styles.push_back(gaussian_vector(rng, c.image_dim, kCenterScale));
  }
  std::vector<std::vector<float>> background_styles;
  for (std::size_t s = 0; s < c.background_styles; ++s) {
    background_styles.push_back(gaussian_vector(rng, c.image_dim, kCenterScale));
  }

  const auto core_weights = zipf_weights(c.core_tags_per_group, c.zipf_exponent);
  const auto brand_weights = zipf_weights(c.brand_tags, c.zipf_exponent);
  const auto background_weights = zipf_weights(background_size, c.zipf_exponent);

  SyntheticData data{BrandCorpus{}, std::move(tag_vectors), VectorTable(c.image_dim), GroundTruth{}};
  std::vector<Brand> brands;
  const int brand_width = static_cast<int>(std::to_string(c.brands).size());
  const int user_width = static_cast<int>(std::to_string(c.followers_per_brand).size());
  std::unordered_set<std::size_t> chosen;

  for (std::size_t b = 0; b < c.brands; ++b) {
    const std::size_t group = b % c.groups;
    const std::size_t members = (c.brands - group + c.groups - 1) / c.groups;
    const double position = members > 1 ? static_cast<double>(b / c.groups) / static_cast<double>(members - 1) : 0.0;
    const double affinity = c.within_group_tag_overlap * (1.0 - c.affinity_spread * position);
    Brand brand{fmt::format("brand{:0{}}", b + 1, brand_width), {}};
    data.truth.brands.push_back(brand.id);
    data.truth.group.push_back(group);
    data.truth.affinity.push_back(affinity);

    for (std::size_t u = 0; u < c.followers_per_brand; ++u) {
      Follower follower{fmt::format("{}_u{:0{}}", brand.id, u + 1, user_width), {}};
      for (std::size_t p = 0; p < c.posts_per_user; ++p) {
        Post post;
        post.brand_id = brand.id;
        post.user_id = follower.user_id;
        post.post_id = fmt::format("{}_p{}", follower.user_id, p + 1);
        post.ordinal = static_cast<std::int64_t>(p + 1);

        chosen.clear();
        while (chosen.size() < c.tags_per_post) {
          std::size_t tag;
          if (rng.uniform() < c.background_fraction) {
            tag = background_begin + rng.weighted(background_weights);
          } else if (rng.uniform() < affinity) {
            tag = core_begin + group * c.core_tags_per_group + rng.weighted(core_weights);
          } else {
            tag = brand_begin + b * c.brand_tags + rng.weighted(brand_weights);
          }
          if (chosen.insert(tag).second) post.tags.push_back(tag_name(tag));
        }

        const auto& style =
            rng.uniform() < affinity
                ? group_styles[group * c.styles_per_group + rng.below(c.styles_per_group)]
                : background_styles[rng.below(c.background_styles)];
        post.image_vector_id = "img_" + post.post_id;
        data.image_vectors.add(*post.image_vector_id, perturbed(rng, style, c.noise));
        follower.posts.push_back(std::move(post));
      }
      brand.followers.push_back(std::move(follower));
    }
    brands.push_back(std::move(brand));
  }
  data.corpus = BrandCorpus::from_brands(std::move(brands), c.posts_per_user);
  return data;
}

std::vector<std::filesystem::path> save_synthetic(const SyntheticData& data,
                                                  const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::vector<std::filesystem::path> files{dir / "posts.jsonl", dir / "tag_vectors.txt",
                                                 dir / "image_vectors.bin", dir / "groups.csv"};
  save_corpus(data.corpus, files[0]);
  save_vectors(data.tag_vectors, files[1], VectorFormat::kText);
  save_vectors(data.image_vectors, files[2], VectorFormat::kBinary);
  std::ofstream groups(files[3]);
  if (!groups) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", files[3].string()));
  groups << "brand_id,group,affinity\n";
  for (std::size_t i = 0; i < data.truth.brands.size(); ++i) {
    groups << fmt::format("{},{},{}\n", data.truth.brands[i], data.truth.group[i], data.truth.affinity[i]);
  }
  return files;
}

SimilarityMatrix brute_force_similarity_oracle(const std::vector<BrandVector>& vectors,
                                               Measure measure) {
  if (vectors.size() < 2) throw Error(ErrorKind::kInvalidArgument, "similarity needs at least 2 brands");
  SimilarityMatrix m;
  m.measure = measure;
  std::vector<const BrandVector*> kept;
  for (const auto& v : vectors) {
    if (v.values.size() != vectors[0].values.size()) {
      throw Error(ErrorKind::kDimension, "brand vectors differ in length");
    }
    if (measure == Measure::kHistogramIntersection && v.kind != VectorKind::kHistogram) {
      throw Error(ErrorKind::kInvalidArgument, "histogram intersection requires histogram vectors");
    }
    bool defined;
    if (measure == Measure::kPearson) {
      defined = false;
      for (double x : v.values) defined = defined || x != v.values[0];
    } else {
      double total = 0.0;
      for (double x : v.values) total += x;
      defined = total > 0.0;
    }
    if (!defined) {
      m.excluded.push_back({v.brand_id, measure == Measure::kPearson
                                            ? "constant vector; correlation undefined"
                                            : "zero-mass histogram"});
      continue;
    }
    kept.push_back(&v);
    m.brands.push_back(v.brand_id);
  }
  if (kept.size() < 2) throw Error(ErrorKind::kUndefined, "fewer than 2 brands with defined vectors");

  const std::size_t n = kept.size();
  m.values.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto& x = kept[i]->values;
      const auto& y = kept[j]->values;
      const double len = static_cast<double>(x.size());
      double value;
      if (measure == Measure::kPearson) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
          sx += x[d];
          sy += y[d];
        }
        const double mx = sx / len, my = sy / len;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
          sxy += (x[d] - mx) * (y[d] - my);
          sxx += (x[d] - mx) * (x[d] - mx);
          syy += (y[d] - my) * (y[d] - my);
        }
        value = sxy / std::sqrt(sxx * syy);
      } else {
        double tx = 0.0, ty = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
          tx += x[d];
          ty += y[d];
        }
        value = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) value += std::min(x[d] / tx, y[d] / ty);
      }
      m.values[i * n + j] = value;
    }
  }
  return m;
}

GroupContrast group_contrast(const SimilarityMatrix& matrix, const GroundTruth& truth) {
  double within = 0.0, across = 0.0;
  std::size_t n_within = 0, n_across = 0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.size(); ++j) {
      auto gi = std::find(truth.brands.begin(), truth.brands.end(), matrix.brands[i]);
      auto gj = std::find(truth.brands.begin(), truth.brands.end(), matrix.brands[j]);
      if (gi == truth.brands.end() || gj == truth.brands.end()) continue;
      const bool same = truth.group[static_cast<std::size_t>(gi - truth.brands.begin())] ==
                        truth.group[static_cast<std::size_t>(gj - truth.brands.begin())];
      (same ? within : across) += matrix.at(i, j);
      ++(same ? n_within : n_across);
    }
  }
  return {n_within ? within / static_cast<double>(n_within) : 0.0,
          n_across ? across / static_cast<double>(n_across) : 0.0};
}

}  // namespace brandsim
