#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace brandsim {

enum class ReferenceMode { kCounts, kBinary };

/// Brand x user grid of purchase counts or 0/1 questionnaire answers.
struct BrandUserMatrix {
  std::vector<std::string> brands;
  std::vector<std::string> users;
  std::vector<std::int64_t> values;  // row-major, brands.size() x users.size()
  ReferenceMode mode = ReferenceMode::kCounts;

  std::int64_t at(std::size_t brand, std::size_t user) const {
    return values[brand * users.size() + user];
  }
  std::span<const std::int64_t> row(std::size_t brand) const {
    return {values.data() + brand * users.size(), users.size()};
  }
};

/// Reads `user_id,brand_id[,value]` rows (header row required). Counts mode
/// sums duplicate rows, a missing value counts as 1. Binary mode requires
/// answers in {0,1}; duplicates combine by logical or. Brands and users are
/// ordered lexicographically.
BrandUserMatrix load_reference(const std::filesystem::path& path, ReferenceMode mode);
BrandUserMatrix parse_reference(std::istream& in, ReferenceMode mode);

}  // namespace brandsim
