#include "brandsim/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>
#include <json.hpp>

#include "brandsim/error.hpp"

namespace brandsim {
namespace {

using nlohmann::json;

void normalize_post_tags(std::vector<std::string>& tags) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  out.reserve(tags.size());
  for (const auto& raw : tags) {
    std::string tag = normalize_tag(raw);
    if (tag.empty() || !seen.insert(tag).second) continue;
    out.push_back(std::move(tag));
  }
  tags = std::move(out);
}

bool more_recent(const Post& a, const Post& b) {
  if (a.ordinal != b.ordinal) return a.ordinal > b.ordinal;
  return a.post_id < b.post_id;
}

std::string required_string(const json& record, const char* field, std::size_t line) {
  auto it = record.find(field);
  if (it == record.end() || !it->is_string() || it->get_ref<const std::string&>().empty()) {
    throw Error(ErrorKind::kParse,
                fmt::format("line {}: missing or empty string field '{}'", line, field));
  }
  return it->get<std::string>();
}

}  // namespace

std::string normalize_tag(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  auto blank = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (begin < end && blank(raw[begin])) ++begin;
  while (end > begin && blank(raw[end - 1])) --end;
  while (begin < end && raw[begin] == '#') ++begin;
  while (begin < end && blank(raw[begin])) ++begin;
  std::string out(raw.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

BrandCorpus BrandCorpus::assemble(
    std::vector<Post> posts, std::size_t posts_per_user,
    const std::vector<std::pair<std::string, std::string>>& declared,
    const std::vector<std::string>& extra_brands) {
  if (posts_per_user == 0) {
    throw Error(ErrorKind::kInvalidArgument, "posts_per_user must be positive");
  }

  std::unordered_map<std::string, std::string> owner;  // user -> brand
  auto claim = [&owner](const std::string& user, const std::string& brand) {
    auto [it, inserted] = owner.emplace(user, brand);
    if (!inserted && it->second != brand) {
      throw Error(ErrorKind::kValidation,
                  fmt::format("user in multiple brands: '{}' appears under '{}' and '{}'", user,
                              it->second, brand));
    }
  };

  std::map<std::string, std::map<std::string, std::vector<Post>>> grouped;
  for (const auto& brand : extra_brands) grouped[brand];
  for (const auto& [brand, user] : declared) {
    claim(user, brand);
    grouped[brand][user];
  }

  std::unordered_set<std::string> post_ids;
  for (auto& post : posts) {
    if (!post_ids.insert(post.post_id).second) {
      throw Error(ErrorKind::kValidation, fmt::format("duplicate post_id '{}'", post.post_id));
    }
    claim(post.user_id, post.brand_id);
    normalize_post_tags(post.tags);
    grouped[post.brand_id][post.user_id].push_back(std::move(post));
  }

  BrandCorpus corpus;
  corpus.posts_per_user_ = posts_per_user;
  corpus.brands_.reserve(grouped.size());
  for (auto& [brand_id, users] : grouped) {
    Brand brand{brand_id, {}};
    brand.followers.reserve(users.size());
    for (auto& [user_id, user_posts] : users) {
      std::sort(user_posts.begin(), user_posts.end(), more_recent);
      if (user_posts.size() > posts_per_user) user_posts.resize(posts_per_user);
      brand.followers.push_back(Follower{user_id, std::move(user_posts)});
    }
    corpus.brands_.push_back(std::move(brand));
  }
  return corpus;
}

BrandCorpus BrandCorpus::from_posts(
    std::vector<Post> posts, std::size_t posts_per_user,
    const std::vector<std::pair<std::string, std::string>>& declared_followers) {
  return assemble(std::move(posts), posts_per_user, declared_followers, {});
}

BrandCorpus BrandCorpus::from_brands(std::vector<Brand> brands, std::size_t posts_per_user) {
  std::vector<Post> posts;
  std::vector<std::pair<std::string, std::string>> declared;
  std::vector<std::string> ids;
  std::set<std::string> seen_brands;
  for (auto& brand : brands) {
    if (!seen_brands.insert(brand.id).second) {
      throw Error(ErrorKind::kValidation, fmt::format("duplicate brand '{}'", brand.id));
    }
    ids.push_back(brand.id);
    for (auto& follower : brand.followers) {
      declared.emplace_back(brand.id, follower.user_id);
      for (auto& post : follower.posts) {
        if (post.brand_id != brand.id || post.user_id != follower.user_id) {
          throw Error(ErrorKind::kValidation,
                      fmt::format("post '{}' is filed under {}/{} but names {}/{}", post.post_id,
                                  brand.id, follower.user_id, post.brand_id, post.user_id));
        }
        posts.push_back(std::move(post));
      }
    }
  }
  return assemble(std::move(posts), posts_per_user, declared, ids);
}

std::size_t BrandCorpus::brand_index(std::string_view brand_id) const {
  auto it = std::lower_bound(brands_.begin(), brands_.end(), brand_id,
                             [](const Brand& b, std::string_view id) { return b.id < id; });
  if (it == brands_.end() || it->id != brand_id) {
    throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown brand '{}'", brand_id));
  }
  return static_cast<std::size_t>(it - brands_.begin());
}

bool BrandCorpus::contains(std::string_view brand_id) const {
  auto it = std::lower_bound(brands_.begin(), brands_.end(), brand_id,
                             [](const Brand& b, std::string_view id) { return b.id < id; });
  return it != brands_.end() && it->id == brand_id;
}

std::size_t BrandCorpus::user_count() const {
  std::size_t n = 0;
  for (const auto& brand : brands_) n += brand.followers.size();
  return n;
}

std::size_t BrandCorpus::post_count() const {
  std::size_t n = 0;
  for (const auto& brand : brands_) {
    for (const auto& follower : brand.followers) n += follower.posts.size();
  }
  return n;
}

std::size_t BrandCorpus::distinct_tag_count() const {
  std::unordered_set<std::string_view> tags;
  for (const auto& brand : brands_) {
    for (const auto& follower : brand.followers) {
      for (const auto& post : follower.posts) tags.insert(post.tags.begin(), post.tags.end());
    }
  }
  return tags.size();
}

BrandCorpus parse_corpus(std::istream& in, std::size_t posts_per_user) {
  std::vector<Post> posts;
  std::vector<std::pair<std::string, std::string>> declared;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, fmt::format("line {}: {}", line_no, e.what()));
    }
    if (!record.is_object()) {
      throw Error(ErrorKind::kParse, fmt::format("line {}: record is not an object", line_no));
    }

    std::string brand = required_string(record, "brand_id", line_no);
    std::string user = required_string(record, "user_id", line_no);
    if (!record.contains("post_id")) {
      declared.emplace_back(std::move(brand), std::move(user));
      continue;
    }

    Post post;
    post.brand_id = std::move(brand);
    post.user_id = std::move(user);
    post.post_id = required_string(record, "post_id", line_no);

    auto ordinal = record.find("ordinal");
    if (ordinal == record.end() || !ordinal->is_number_integer()) {
      throw Error(ErrorKind::kParse, fmt::format("line {}: 'ordinal' must be an integer", line_no));
    }
    post.ordinal = ordinal->get<std::int64_t>();

    if (auto tags = record.find("tags"); tags != record.end()) {
      if (!tags->is_array()) {
        throw Error(ErrorKind::kParse, fmt::format("line {}: 'tags' must be an array", line_no));
      }
      for (const auto& tag : *tags) {
        if (!tag.is_string()) {
          throw Error(ErrorKind::kParse,
                      fmt::format("line {}: 'tags' entries must be strings", line_no));
        }
        post.tags.push_back(tag.get<std::string>());
      }
    }

    if (auto image = record.find("image_vector_id"); image != record.end() && !image->is_null()) {
      if (!image->is_string()) {
        throw Error(ErrorKind::kParse,
                    fmt::format("line {}: 'image_vector_id' must be a string", line_no));
      }
      post.image_vector_id = image->get<std::string>();
    }
    posts.push_back(std::move(post));
  }
  return BrandCorpus::from_posts(std::move(posts), posts_per_user, declared);
}

BrandCorpus load_corpus(const std::filesystem::path& path, std::size_t posts_per_user) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open corpus file '{}'", path.string()));
  return parse_corpus(in, posts_per_user);
}

void write_corpus(const BrandCorpus& corpus, std::ostream& out) {
  for (const auto& brand : corpus.brands()) {
    for (const auto& follower : brand.followers) {
      if (follower.posts.empty()) {
        out << json{{"brand_id", brand.id}, {"user_id", follower.user_id}}.dump() << '\n';
        continue;
      }
      for (const auto& post : follower.posts) {
        json record{{"brand_id", post.brand_id}, {"user_id", post.user_id},
                    {"post_id", post.post_id},   {"ordinal", post.ordinal},
                    {"tags", post.tags}};
        if (post.image_vector_id) record["image_vector_id"] = *post.image_vector_id;
        out << record.dump() << '\n';
      }
    }
  }
}

void save_corpus(const BrandCorpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  write_corpus(corpus, out);
}

}  // namespace brandsim
