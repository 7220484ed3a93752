#include "brandsim/evaluation.hpp"

#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "brandsim/error.hpp"
#include "brandsim/synth.hpp"
#include "test_support.hpp"

namespace brandsim {
namespace {

using V = std::vector<double>;
using testing::make_post;

SimilarityMatrix matrix_from_triangle(const std::vector<std::string>& brands, const V& upper,
                                      Measure measure = Measure::kPearson) {
  SimilarityMatrix m;
  m.brands = brands;
  m.measure = measure;
  const auto n = brands.size();
  m.values.assign(n * n, 1.0);
  std::size_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m.at(i, j) = upper[t];
      m.at(j, i) = upper[t];
      ++t;
    }
  }
  return m;
}

SimilarityMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::string> brands;
  for (std::size_t i = 0; i < n; ++i) brands.push_back("b" + std::to_string(i));
  V upper(n * (n - 1) / 2);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (auto& v : upper) v = dist(rng);
  return matrix_from_triangle(brands, upper);
}

TEST(ReferenceSimilarity, IdenticalAndScaledRows) {
  BrandUserMatrix m{{"A", "B", "C"}, {"u1", "u2", "u3"}, {1, 0, 2, 2, 0, 4, 1, 0, 2}, ReferenceMode::kCounts};
  const auto s = reference_similarity(m);
  EXPECT_NEAR(s.at(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(s.at(0, 2), 1.0, 1e-12);
}

TEST(ReferenceSimilarity, MatchesRowPairPearsonLoop) {
  BrandUserMatrix m{{"A", "B", "C"}, {"u1", "u2", "u3", "u4"}, {3, 0, 1, 5, 0, 2, 2, 1, 4, 4, 0, 0},
                    ReferenceMode::kCounts};
  const auto s = reference_similarity(m);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      V x(m.row(i).begin(), m.row(i).end()), y(m.row(j).begin(), m.row(j).end());
      EXPECT_NEAR(s.at(i, j), testing::oracle_pearson(x, y), 1e-12);
    }
  }
}

TEST(ReferenceSimilarity, BinaryScaledByThreeIsIdentical) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    BrandUserMatrix m;
    m.mode = ReferenceMode::kBinary;
    for (int b = 0; b < 5; ++b) m.brands.push_back("b" + std::to_string(b));
    for (int u = 0; u < 12; ++u) m.users.push_back("u" + std::to_string(u));
    for (std::size_t i = 0; i < 60; ++i) m.values.push_back(static_cast<std::int64_t>(rng() % 2));
    for (std::size_t b = 0; b < 5; ++b) {
      m.values[b * 12] = 1;
      m.values[b * 12 + 1] = 0;
    }
    auto scaled = m;
    scaled.mode = ReferenceMode::kCounts;
    for (auto& v : scaled.values) v *= 3;
    const auto a = reference_similarity(m).values;
    const auto b = reference_similarity(scaled).values;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);  // equal up to rounding
  }
}

TEST(Spearman, Examples) {
  EXPECT_NEAR(spearman(V{1, 2, 3}, V{10, 20, 30}), 1.0, 1e-12);
  EXPECT_NEAR(spearman(V{1, 2, 3}, V{3, 2, 1}), -1.0, 1e-12);
  EXPECT_NEAR(spearman(V{1, 2, 3}, V{1, 3, 2}), 0.5, 1e-12);
}

TEST(Spearman, TiesGetAverageRanks) {
  EXPECT_EQ(average_ranks(V{5, 1, 5, 3}), (V{3.5, 1, 3.5, 2}));
}

TEST(Spearman, MatchesOracleAndIgnoresMonotoneTransforms) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    V x(3 + rng() % 30), y(x.size());
    for (auto& v : x) v = static_cast<double>(rng() % 8);  // plenty of ties
    for (auto& v : y) v = static_cast<double>(rng() % 8);
    x[0] = -1;
    y[1] = -1;
    const double rho = spearman(x, y);
    EXPECT_NEAR(rho, testing::oracle_spearman(x, y), 1e-9);
    V tx = x;
    for (auto& v : tx) v = std::exp(v) * 4 + 7;
    EXPECT_NEAR(spearman(tx, y), rho, 1e-12);
  }
}

TEST(CompareSimilarities, SelfAndMonotoneTransform) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_matrix(rng, 3 + rng() % 10);
    EXPECT_NEAR(compare_similarities(a, a).rho, 1.0, 1e-12);
    auto b = a;
    for (auto& v : b.values) v = std::tanh(v) * 3 - 1;
    EXPECT_NEAR(compare_similarities(a, b).rho, 1.0, 1e-12);
    const auto c = random_matrix(rng, a.size());
    EXPECT_EQ(compare_similarities(a, c).rho, compare_similarities(c, a).rho);
  }
}

TEST(CompareSimilarities, TriangleFixture) {
  const auto a = matrix_from_triangle({"A", "B", "C"}, {0.9, 0.1, 0.5});
  const auto b = matrix_from_triangle({"A", "B", "C"}, {0.8, 0.2, 0.6});
  const auto result = compare_similarities(a, b);
  EXPECT_NEAR(result.rho, 1.0, 1e-12);
  EXPECT_EQ(result.pairs_used, 3u);
}

TEST(CompareSimilarities, CommonBrandsAndExclusions) {
  auto a = matrix_from_triangle({"A", "B", "C", "D"}, {0.9, 0.1, 0.5, 0.3, 0.2, 0.7});
  a.excluded.push_back({"Z", "constant vector"});
  const auto b = matrix_from_triangle({"A", "B", "C", "E"}, {0.8, 0.2, 0.1, 0.6, 0.1, 0.1});
  const auto result = compare_similarities(a, b);
  EXPECT_EQ(result.pairs_used, 3u);
  EXPECT_EQ(result.excluded_brands, (std::vector<std::string>{"D", "E", "Z"}));
  EXPECT_NEAR(result.rho, 1.0, 1e-12);

  ComparisonOptions options;
  options.brand_filter = std::vector<std::string>{"A", "B"};
  EXPECT_THROW(compare_similarities(a, b, options), Error);
}

TEST(CompareSimilarities, PerBrandScope) {
  std::mt19937_64 rng(2);
  const auto a = random_matrix(rng, 6);
  ComparisonOptions options;
  options.scope = ComparisonScope::kPerBrand;
  EXPECT_NEAR(compare_similarities(a, a, options).rho, 1.0, 1e-12);
}

TEST(SplitFollowers, HalvesPartitionEachBrand) {
  SynthConfig c;
  c.brands = 3;
  c.groups = 1;
  c.followers_per_brand = 7;
  c.posts_per_user = 2;
  c.tag_vocab = 400;
  const auto data = generate_synthetic_corpus(c);
  const auto [a, b] = split_followers(data.corpus, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.brands()[i].followers.size(), 4u);
    EXPECT_EQ(b.brands()[i].followers.size(), 3u);
  }
  EXPECT_EQ(a.user_count() + b.user_count(), data.corpus.user_count());
  EXPECT_EQ(split_followers(data.corpus, 5).first, a);
  EXPECT_EQ(sample_followers(data.corpus, 7, 9), data.corpus);
  EXPECT_THROW(sample_followers(data.corpus, 8, 9), Error);
}

// Every follower of a brand posts the same tags, so any two halves of equal
// size see identical tag statistics.
struct IdenticalFollowers {
  BrandCorpus corpus;
  VectorTable tags{3};
};

IdenticalFollowers identical_followers() {
  const std::vector<std::vector<std::string>> brand_tags{
      {"t0", "t1", "t2"}, {"t1", "t2", "t3"}, {"t3", "t4", "t5"}, {"t0", "t5", "t6"}, {"t2", "t4", "t6"}};
  std::vector<Post> posts;
  for (std::size_t b = 0; b < brand_tags.size(); ++b) {
    for (int u = 0; u < 10; ++u) {
      const auto user = "b" + std::to_string(b) + "u" + std::to_string(u);
      posts.push_back(make_post("b" + std::to_string(b), user, user + "p", 1, brand_tags[b]));
    }
  }
  IdenticalFollowers f{BrandCorpus::from_posts(posts, 10), VectorTable(3)};
  std::mt19937_64 rng(6);
  std::normal_distribution<float> dist(0.0f, 1.0f);
  for (int t = 0; t < 7; ++t) {
    const float v[] = {dist(rng), dist(rng), dist(rng)};
    f.tags.add("t" + std::to_string(t), v);
  }
  return f;
}

PipelineConfig small_config() {
  PipelineConfig config;
  config.k = 3;
  config.batch_size = 4;
  config.iterations = 20;
  config.tag_dim = 3;
  return config;
}

TEST(SplitHalfStability, IdenticalHalvesGiveOne) {
  const auto f = identical_followers();
  auto config = small_config();
  for (auto [repr, measure] : {std::pair{VectorKind::kHistogram, Measure::kHistogramIntersection},
                               std::pair{VectorKind::kAverage, Measure::kPearson}}) {
    config.repr = repr;
    config.measure = measure;
    const auto result = split_half_stability(f.corpus, &f.tags, nullptr, config, 3, 11);
    ASSERT_EQ(result.per_repeat_rho.size(), 3u);
    for (double rho : result.per_repeat_rho) EXPECT_NEAR(rho, 1.0, 1e-12);
    EXPECT_NEAR(result.mean_rho, 1.0, 1e-12);
  }
}

TEST(SubsampleStability, FullSampleGivesOne) {
  const auto f = identical_followers();
  auto config = small_config();
  config.repr = VectorKind::kAverage;
  config.measure = Measure::kPearson;
  const auto result = subsample_stability(f.corpus, &f.tags, nullptr, config, 10, 2, 4);
  for (double rho : result.per_repeat_rho) EXPECT_NEAR(rho, 1.0, 1e-12);
}

TEST(Stability, SeededRunsRepeatExactly) {
  SynthConfig c;
  c.brands = 4;
  c.followers_per_brand = 20;
  c.posts_per_user = 3;
  c.tag_vocab = 600;
  c.tag_dim = 8;
  const auto data = generate_synthetic_corpus(c);
  auto config = small_config();
  config.k = 10;
  config.tag_dim = 8;
  const auto a = split_half_stability(data.corpus, &data.tag_vectors, nullptr, config, 3, 77);
  const auto b = split_half_stability(data.corpus, &data.tag_vectors, nullptr, config, 3, 77);
  EXPECT_EQ(a.per_repeat_rho, b.per_repeat_rho);
  const auto s = subsample_stability(data.corpus, &data.tag_vectors, nullptr, config, 10, 2, 5);
  EXPECT_EQ(s.per_repeat_rho,
            subsample_stability(data.corpus, &data.tag_vectors, nullptr, config, 10, 2, 5).per_repeat_rho);
}

TEST(Stability, JsonCarriesSeedAndParameters) {
  StabilityResult r{2, {0.5, 0.7}, 0.6};
  const auto json = nlohmann::json::parse(stability_json("subsample", r, PipelineConfig{}, 9, 25));
  EXPECT_EQ(json["seed"], 9);
  EXPECT_EQ(json["m"], 25);
  EXPECT_EQ(json["method"], "tag-hist-freq-hi");
  EXPECT_DOUBLE_EQ(json["mean_rho"].get<double>(), 0.6);
}

}  // namespace
}  // namespace brandsim
