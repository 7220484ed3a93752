#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace brandsim {

/// Lowercase, strip leading '#', trim whitespace. Returns empty for a tag that
/// is nothing but '#' and blanks.
std::string normalize_tag(std::string_view raw);

struct Post {
  std::string brand_id;
  std::string user_id;
  std::string post_id;
  std::int64_t ordinal = 0;  // larger = more recent
  std::vector<std::string> tags;
  std::optional<std::string> image_vector_id;

  bool operator==(const Post&) const = default;
};

struct Follower {
  std::string user_id;
  std::vector<Post> posts;  // most recent first

  bool operator==(const Follower&) const = default;
};

struct Brand {
  std::string id;
  std::vector<Follower> followers;  // sorted by user_id

  bool operator==(const Brand&) const = default;
};

/// Brands -> followers -> posts. Immutable once built.
///
/// Construction enforces: every user belongs to exactly one brand, post ids
/// are unique, tags within a post are normalized and unique, and each user
/// keeps at most `posts_per_user` posts (the highest ordinals).
class BrandCorpus {
 public:
  BrandCorpus() = default;

  /// Groups posts by brand and user. `declared_followers` lists
  /// (brand_id, user_id) pairs for users with no posts.
  static BrandCorpus from_posts(
      std::vector<Post> posts, std::size_t posts_per_user,
      const std::vector<std::pair<std::string, std::string>>& declared_followers = {});

  /// Builds from already grouped brands, re-checking every invariant.
  static BrandCorpus from_brands(std::vector<Brand> brands, std::size_t posts_per_user);

  const std::vector<Brand>& brands() const noexcept { return brands_; }
  std::size_t brand_count() const noexcept { return brands_.size(); }
  std::size_t posts_per_user() const noexcept { return posts_per_user_; }

  /// Index of `brand_id` in brands(); throws kInvalidArgument when absent.
  std::size_t brand_index(std::string_view brand_id) const;
  const Brand& brand(std::string_view brand_id) const { return brands_[brand_index(brand_id)]; }
  bool contains(std::string_view brand_id) const;

  std::size_t user_count() const;
  std::size_t post_count() const;
  std::size_t distinct_tag_count() const;

  bool operator==(const BrandCorpus&) const = default;

 private:
  static BrandCorpus assemble(std::vector<Post> posts, std::size_t posts_per_user,
                              const std::vector<std::pair<std::string, std::string>>& declared,
                              const std::vector<std::string>& extra_brands);

  std::vector<Brand> brands_;  // sorted by id
  std::size_t posts_per_user_ = 0;
};

/// Reads the line-delimited posts format. Parse errors carry the line number.
BrandCorpus load_corpus(const std::filesystem::path& path, std::size_t posts_per_user);
BrandCorpus parse_corpus(std::istream& in, std::size_t posts_per_user);

/// Writes the corpus in the posts format (one record per post, plus a
/// follower-only record for users without posts).
void write_corpus(const BrandCorpus& corpus, std::ostream& out);
void save_corpus(const BrandCorpus& corpus, const std::filesystem::path& path);

}  // namespace brandsim
