#include "brandsim/corpus.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "brandsim/error.hpp"
#include "test_support.hpp"

namespace brandsim {
namespace {

using testing::make_post;

BrandCorpus parse(const std::string& text, std::size_t posts_per_user = 10) {
  std::istringstream in(text);
  return parse_corpus(in, posts_per_user);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected brandsim::Error";
  return ErrorKind::kUndefined;
}

TEST(NormalizeTag, LowercasesStripsHashAndTrims) {
  EXPECT_EQ(normalize_tag("  #Coffee "), "coffee");
  EXPECT_EQ(normalize_tag("##Latte"), "latte");
  EXPECT_EQ(normalize_tag("tokyo"), "tokyo");
  EXPECT_EQ(normalize_tag(" # "), "");
}

TEST(LoadCorpus, TwoPostsOneUser) {
  const auto corpus = parse(
      R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1,"tags":["#x"]})"
      "\n"
      R"({"brand_id":"A","user_id":"u1","post_id":"p2","ordinal":2,"tags":["y"],"image_vector_id":"i2"})"
      "\n");
  EXPECT_EQ(corpus.brand_count(), 1u);
  EXPECT_EQ(corpus.user_count(), 1u);
  EXPECT_EQ(corpus.post_count(), 2u);
  const auto& posts = corpus.brands()[0].followers[0].posts;
  EXPECT_EQ(posts[0].post_id, "p2");  // most recent first
  EXPECT_EQ(posts[0].image_vector_id, std::optional<std::string>("i2"));
  EXPECT_EQ(posts[1].tags, std::vector<std::string>{"x"});
}

TEST(LoadCorpus, UserUnderTwoBrandsIsRejected) {
  try {
    parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1,"tags":[]})"
          "\n"
          R"({"brand_id":"B","user_id":"u1","post_id":"p2","ordinal":2,"tags":[]})");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("user in multiple brands"), std::string::npos);
  }
}

TEST(LoadCorpus, KeepsTheMostRecentPostsPerUser) {
  std::string text;
  for (int i = 1; i <= 12; ++i) {
    text += R"({"brand_id":"A","user_id":"u1","post_id":"p)" + std::to_string(i) +
            R"(","ordinal":)" + std::to_string(i) + R"(,"tags":[]})" + "\n";
  }
  const auto corpus = parse(text, 10);
  const auto& posts = corpus.brands()[0].followers[0].posts;
  ASSERT_EQ(posts.size(), 10u);
  std::set<std::int64_t> ordinals;
  for (const auto& p : posts) ordinals.insert(p.ordinal);
  EXPECT_EQ(*ordinals.begin(), 3);
  EXPECT_EQ(*ordinals.rbegin(), 12);
}

TEST(LoadCorpus, MalformedLineReportsLineNumber) {
  try {
    parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1,"tags":[]})"
          "\n\n{not json\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, FieldErrors) {
  EXPECT_EQ(kind_of([] { parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","tags":[]})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse(R"({"brand_id":"A","post_id":"p1","ordinal":1})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse(R"({"brand_id":"A","user_id":"u","post_id":"p","ordinal":1,"tags":"x"})"); }),
            ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse(R"([1,2])"); }), ErrorKind::kParse);
}

TEST(LoadCorpus, DuplicatePostIdIsRejected) {
  EXPECT_EQ(kind_of([] {
              parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1})"
                    "\n"
                    R"({"brand_id":"A","user_id":"u2","post_id":"p1","ordinal":1})");
            }),
            ErrorKind::kValidation);
}

TEST(LoadCorpus, TagsAreNormalizedAndDeduplicatedWithinPost) {
  const auto corpus =
      parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1,"tags":["#Cafe","cafe"," CAFE ","x","#"]})");
  EXPECT_EQ(corpus.brands()[0].followers[0].posts[0].tags, (std::vector<std::string>{"cafe", "x"}));
}

TEST(LoadCorpus, FollowerRecordWithoutPostsCountsAsFollower) {
  const auto corpus = parse(R"({"brand_id":"A","user_id":"u1"})"
                            "\n"
                            R"({"brand_id":"A","user_id":"u2","post_id":"p","ordinal":1})");
  EXPECT_EQ(corpus.user_count(), 2u);
  EXPECT_EQ(corpus.post_count(), 1u);
}

TEST(LoadCorpus, MissingFileIsAnIoError) {
  EXPECT_EQ(kind_of([] { load_corpus("/nonexistent/posts.jsonl", 10); }), ErrorKind::kIo);
}

TEST(LoadCorpus, UnknownBrandLookupThrows) {
  const auto corpus = parse(R"({"brand_id":"A","user_id":"u1","post_id":"p1","ordinal":1})");
  EXPECT_TRUE(corpus.contains("A"));
  EXPECT_FALSE(corpus.contains("B"));
  EXPECT_EQ(kind_of([&] { corpus.brand("B"); }), ErrorKind::kInvalidArgument);
}

TEST(CorpusProperties, LoadIsDeterministicAndRoundTrips) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Post> posts;
    int next = 0;
    const int brands = 1 + static_cast<int>(rng() % 4);
    for (int b = 0; b < brands; ++b) {
      const int users = 1 + static_cast<int>(rng() % 5);
      for (int u = 0; u < users; ++u) {
        const int n = static_cast<int>(rng() % 14);
        for (int p = 0; p < n; ++p) {
          std::vector<std::string> tags;
          for (int t = static_cast<int>(rng() % 4); t > 0; --t) tags.push_back("t" + std::to_string(rng() % 6));
          std::optional<std::string> image;
          if (rng() % 2) image = "img" + std::to_string(next);
          posts.push_back(make_post("B" + std::to_string(b), "B" + std::to_string(b) + "u" + std::to_string(u),
                                    "p" + std::to_string(next++), static_cast<std::int64_t>(rng() % 100),
                                    tags, image));
        }
      }
    }
    std::shuffle(posts.begin(), posts.end(), rng);
    const auto corpus = BrandCorpus::from_posts(posts, 10);
    std::stringstream once;
    write_corpus(corpus, once);
    const auto text = once.str();
    const auto reloaded = parse(text, 10);
    EXPECT_EQ(reloaded, corpus);
    EXPECT_EQ(parse(text, 10), reloaded);

    std::set<std::string> users;
    for (const auto& brand : reloaded.brands()) {
      for (const auto& f : brand.followers) EXPECT_TRUE(users.insert(f.user_id).second);
    }
  }
}

TEST(BrandCorpus, FromBrandsRejectsMisfiledPosts) {
  std::vector<Brand> brands{{"A", {{"u1", {make_post("B", "u1", "p1", 1, {})}}}}};
  EXPECT_EQ(kind_of([&] { BrandCorpus::from_brands(brands, 10); }), ErrorKind::kValidation);
}

TEST(BrandCorpus, ZeroPostsPerUserIsInvalid) {
  EXPECT_EQ(kind_of([] { BrandCorpus::from_posts({}, 0); }), ErrorKind::kInvalidArgument);
}

}  // namespace
}  // namespace brandsim
