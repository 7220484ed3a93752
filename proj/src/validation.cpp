#include "brandsim/validation.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include <fmt/core.h>

namespace brandsim {

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const Finding& f) {
    return f.severity == Severity::kError;
  }));
}

std::size_t ValidationReport::warning_count() const {
  return findings.size() - error_count();
}

ValidationReport validate_corpus(const BrandCorpus& corpus, const VectorTable* tag_table,
                                 const VectorTable* image_table) {
  ValidationReport report;
  report.brands = corpus.brand_count();
  report.users = corpus.user_count();
  report.posts = corpus.post_count();
  report.distinct_tags = corpus.distinct_tag_count();

  auto error = [&report](std::string location, std::string message) {
    report.findings.push_back({Severity::kError, std::move(location), std::move(message)});
  };
  auto warn = [&report](std::string location, std::string message) {
    report.findings.push_back({Severity::kWarning, std::move(location), std::move(message)});
  };

  // Structural invariants. A corpus built through BrandCorpus already holds
  // them; the checks stay so the report is complete on its own.
  std::unordered_map<std::string_view, std::string_view> owner;
  std::unordered_set<std::string_view> post_ids;
  for (const auto& brand : corpus.brands()) {
    if (brand.followers.empty()) warn(fmt::format("brand {}", brand.id), "brand has no followers");
    for (const auto& follower : brand.followers) {
      auto [it, inserted] = owner.emplace(follower.user_id, brand.id);
      if (!inserted) {
        error(fmt::format("user {}", follower.user_id),
              fmt::format("user in multiple brands ({}, {})", it->second, brand.id));
      }
      if (follower.posts.size() > corpus.posts_per_user()) {
        error(fmt::format("user {}", follower.user_id),
              fmt::format("{} posts exceed the limit of {}", follower.posts.size(),
                          corpus.posts_per_user()));
      }
      for (const auto& post : follower.posts) {
        const auto location = fmt::format("post {}", post.post_id);
        if (!post_ids.insert(post.post_id).second) error(location, "duplicate post_id");
        std::unordered_set<std::string_view> tags(post.tags.begin(), post.tags.end());
        if (tags.size() != post.tags.size()) error(location, "duplicate tag within post");

        if (image_table && post.image_vector_id && !image_table->contains(*post.image_vector_id)) {
          error(location, fmt::format("image vector '{}' not found", *post.image_vector_id));
        }
        if (tag_table) {
          std::string missing;
          for (const auto& tag : post.tags) {
            if (tag_table->contains(tag)) continue;
            if (!missing.empty()) missing += ", ";
            missing += tag;
          }
          if (!missing.empty()) {
            warn(location, fmt::format("tags without embedding (skipped): {}", missing));
          }
        }
      }
    }
  }
  return report;
}

std::string format_report(const ValidationReport& report) {
  std::string out = fmt::format("brands={} users={} posts={} distinct_tags={} errors={} warnings={}\n",
                                report.brands, report.users, report.posts, report.distinct_tags,
                                report.error_count(), report.warning_count());
  for (const auto& f : report.findings) {
    out += fmt::format("{}\t{}\t{}\n", f.severity == Severity::kError ? "error" : "warning",
                       f.location, f.message);
  }
  return out;
}

}  // namespace brandsim
