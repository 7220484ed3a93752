#include "brandsim/synth.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "brandsim/error.hpp"
#include "brandsim/tag_ranking.hpp"
#include "brandsim/validation.hpp"
#include "test_support.hpp"

namespace brandsim {
namespace {

double jaccard(const RankedTagList& a, const RankedTagList& b) {
  std::set<std::string> sa, sb, both;
  for (const auto& e : a.entries) sa.insert(e.tag);
  for (const auto& e : b.entries) sb.insert(e.tag);
  both = sa;
  both.insert(sb.begin(), sb.end());
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(both.size());
}

TEST(GenerateSynthetic, WithinGroupTopTagsOverlapMore) {
  SynthConfig c;
  c.brands = 4;
  c.groups = 2;
  c.within_group_tag_overlap = 0.9;
  c.followers_per_brand = 100;
  c.tag_dim = 4;
  c.image_dim = 4;
  const auto data = generate_synthetic_corpus(c);
  RankingOptions options;
  options.top_n = 50;
  const auto lists = rank_all_brands(data.corpus, options);
  double within = 0, across = 0;
  int nw = 0, na = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      const double v = jaccard(lists[i], lists[j]);
      if (data.truth.group[i] == data.truth.group[j]) {
        within += v;
        ++nw;
      } else {
        across += v;
        ++na;
      }
    }
  }
  EXPECT_GT(within / nw, across / na);
}

TEST(GenerateSynthetic, CountsAndValidation) {
  SynthConfig c;
  c.brands = 3;
  c.followers_per_brand = 10;
  c.posts_per_user = 10;
  c.tag_vocab = 500;
  const auto data = generate_synthetic_corpus(c);
  for (const auto& brand : data.corpus.brands()) {
    std::size_t posts = 0;
    for (const auto& f : brand.followers) posts += f.posts.size();
    EXPECT_EQ(posts, 100u);
  }
  const auto report = validate_corpus(data.corpus, &data.tag_vectors, &data.image_vectors);
  EXPECT_EQ(report.error_count(), 0u);
  EXPECT_EQ(report.warning_count(), 0u);
  EXPECT_EQ(data.tag_vectors.dim(), 100u);
  EXPECT_EQ(data.image_vectors.dim(), 64u);
}

TEST(GenerateSynthetic, EveryBrandHasOneGroup) {
  SynthConfig c;
  c.brands = 7;
  c.groups = 3;
  c.followers_per_brand = 5;
  c.tag_vocab = 600;
  const auto data = generate_synthetic_corpus(c);
  ASSERT_EQ(data.truth.brands.size(), 7u);
  for (std::size_t b = 0; b < 7; ++b) {
    EXPECT_EQ(data.truth.group[b], b % 3);
    EXPECT_EQ(data.truth.brands[b], data.corpus.brands()[b].id);
  }
}

TEST(GenerateSynthetic, AffinityStepsDownWithinEachGroup) {
  SynthConfig c;
  c.brands = 6;
  c.groups = 2;
  c.followers_per_brand = 2;
  c.within_group_tag_overlap = 0.8;
  c.affinity_spread = 0.5;
  const auto data = generate_synthetic_corpus(c);
  // group 0 holds brands 0, 2, 4; group 1 holds 1, 3, 5
  EXPECT_DOUBLE_EQ(data.truth.affinity[0], 0.8);
  EXPECT_DOUBLE_EQ(data.truth.affinity[2], 0.6);
  EXPECT_DOUBLE_EQ(data.truth.affinity[4], 0.4);
  EXPECT_DOUBLE_EQ(data.truth.affinity[5], 0.4);
  c.affinity_spread = 0.0;
  for (double a : generate_synthetic_corpus(c).truth.affinity) EXPECT_DOUBLE_EQ(a, 0.8);
  c.affinity_spread = 1.2;
  EXPECT_THROW(generate_synthetic_corpus(c), Error);
}

TEST(GenerateSynthetic, Deterministic) {
  SynthConfig c;
  c.brands = 3;
  c.followers_per_brand = 20;
  c.tag_vocab = 500;
  const auto a = generate_synthetic_corpus(c);
  const auto b = generate_synthetic_corpus(c);
  EXPECT_EQ(a.corpus, b.corpus);
  EXPECT_EQ(a.tag_vectors, b.tag_vectors);
  EXPECT_EQ(a.image_vectors, b.image_vectors);
  EXPECT_EQ(a.truth, b.truth);
  c.seed = 2;
  EXPECT_FALSE(generate_synthetic_corpus(c).corpus == a.corpus);
}

TEST(GenerateSynthetic, RandomConfigsAlwaysValidate) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 15; ++trial) {
    SynthConfig c;
    c.brands = 2 + rng() % 5;
    c.groups = 1 + rng() % c.brands;
    c.followers_per_brand = 1 + rng() % 10;
    c.posts_per_user = 1 + rng() % 5;
    c.tags_per_post = 1 + rng() % 5;
    c.core_tags_per_group = 5 + rng() % 10;
    c.brand_tags = 5 + rng() % 10;
    c.tag_vocab = c.groups * c.core_tags_per_group + c.brands * c.brand_tags + 10;
    c.tag_dim = 3;
    c.image_dim = 3;
    c.within_group_tag_overlap = static_cast<double>(rng() % 11) / 10.0;
    c.background_fraction = static_cast<double>(rng() % 6) / 10.0;
    c.seed = rng();
    const auto data = generate_synthetic_corpus(c);
    EXPECT_EQ(validate_corpus(data.corpus, &data.tag_vectors, &data.image_vectors).error_count(), 0u);
  }
}

TEST(GenerateSynthetic, InfeasibleSettings) {
  SynthConfig c;
  c.groups = 9;
  EXPECT_THROW(generate_synthetic_corpus(c), Error);
  c = SynthConfig{};
  c.within_group_tag_overlap = 1.5;
  EXPECT_THROW(generate_synthetic_corpus(c), Error);
  c = SynthConfig{};
  c.tag_vocab = 100;
  try {
    generate_synthetic_corpus(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument);
  }
}

TEST(SaveSynthetic, FilesReload) {
  testing::TempDir dir("synth");
  SynthConfig c;
  c.brands = 2;
  c.groups = 1;
  c.followers_per_brand = 4;
  c.tag_vocab = 300;
  const auto data = generate_synthetic_corpus(c);
  const auto files = save_synthetic(data, dir.path());
  EXPECT_EQ(files.size(), 4u);
  EXPECT_EQ(load_corpus(dir / "posts.jsonl", c.posts_per_user), data.corpus);
  EXPECT_EQ(load_vectors(dir / "tag_vectors.txt", c.tag_dim), data.tag_vectors);
  EXPECT_EQ(load_vectors(dir / "image_vectors.bin", c.image_dim), data.image_vectors);
}

TEST(BruteForceOracle, AgreesWithSimilarityMatrix) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BrandVector> vectors;
    const std::size_t n = 2 + rng() % 10, dim = 2 + rng() % 20;
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<double> v(dim);
      for (auto& x : v) x = static_cast<double>(rng() % 9);
      v[0] += 1;
      v[1] += static_cast<double>(b % 2);
      vectors.push_back({"b" + std::to_string(b), VectorKind::kHistogram, v, 0});
    }
    for (auto measure : {Measure::kPearson, Measure::kHistogramIntersection}) {
      SimilarityMatrix fast;
      try {
        fast = similarity_matrix(vectors, measure);
      } catch (const Error&) {
        EXPECT_THROW(brute_force_similarity_oracle(vectors, measure), Error);
        continue;
      }
      const auto slow = brute_force_similarity_oracle(vectors, measure);
      ASSERT_EQ(fast.brands, slow.brands);
      const double tol = measure == Measure::kPearson ? 1e-9 : 1e-12;
      for (std::size_t i = 0; i < fast.values.size(); ++i) EXPECT_NEAR(fast.values[i], slow.values[i], tol);
    }
  }
}

TEST(BruteForceOracle, IdenticalVectorsAndShape) {
  std::vector<BrandVector> v{{"A", VectorKind::kHistogram, {1, 2, 3}, 0},
                             {"B", VectorKind::kHistogram, {1, 2, 3}, 0},
                             {"C", VectorKind::kHistogram, {3, 0, 1}, 0}};
  const auto m = brute_force_similarity_oracle(v, Measure::kPearson);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_NEAR(m.at(0, 1), 1.0, 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at(i, j), m.at(j, i));
}

TEST(GroupContrast, Means) {
  SimilarityMatrix m;
  m.brands = {"A", "B", "C"};
  m.values = {1, 0.8, 0.2, 0.8, 1, 0.4, 0.2, 0.4, 1};
  const auto g = group_contrast(m, GroundTruth{{"A", "B", "C"}, {0, 0, 1}});
  EXPECT_DOUBLE_EQ(g.within, 0.8);
  EXPECT_DOUBLE_EQ(g.across, 0.3);
}

}  // namespace
}  // namespace brandsim
