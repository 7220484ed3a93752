#include "brandsim/brand_user_matrix.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <string_view>

#include <fmt/core.h>

#include "brandsim/error.hpp"

namespace brandsim {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

BrandUserMatrix parse_reference(std::istream& in, ReferenceMode mode) {
  std::map<std::pair<std::string, std::string>, std::int64_t> cells;  // (brand, user)
  std::map<std::string, std::size_t> brand_index;
  std::map<std::string, std::size_t> user_index;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (!header_seen) {
      if (fields.size() < 2) {
        throw Error(ErrorKind::kParse,
                    fmt::format("line {}: header 'user_id,brand_id[,value]' required", line_no));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorKind::kParse,
                  fmt::format("line {}: expected 'user_id,brand_id[,value]'", line_no));
    }

    std::int64_t value = 1;
    if (fields.size() == 3) {
      const auto text = fields[2];
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::kParse, fmt::format("line {}: bad value '{}'", line_no, text));
      }
    }
    if (mode == ReferenceMode::kCounts && value < 0) {
      throw Error(ErrorKind::kValidation, fmt::format("line {}: negative count {}", line_no, value));
    }
    if (mode == ReferenceMode::kBinary && value != 0 && value != 1) {
      throw Error(ErrorKind::kValidation,
                  fmt::format("line {}: binary answer must be 0 or 1, got {}", line_no, value));
    }

    std::string user(fields[0]);
    std::string brand(fields[1]);
    brand_index.emplace(brand, 0);
    user_index.emplace(user, 0);
    auto& cell = cells[{std::move(brand), std::move(user)}];
    cell = mode == ReferenceMode::kCounts ? cell + value : std::max(cell, value);
  }
  if (!header_seen) throw Error(ErrorKind::kParse, "reference file is empty (header row required)");

  BrandUserMatrix m;
  m.mode = mode;
  for (auto& [id, index] : brand_index) {
    index = m.brands.size();
    m.brands.push_back(id);
  }
  for (auto& [id, index] : user_index) {
    index = m.users.size();
    m.users.push_back(id);
  }
  m.values.assign(m.brands.size() * m.users.size(), 0);
  for (const auto& [key, value] : cells) {
    m.values[brand_index[key.first] * m.users.size() + user_index[key.second]] = value;
  }
  return m;
}

BrandUserMatrix load_reference(const std::filesystem::path& path, ReferenceMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open reference file '{}'", path.string()));
  return parse_reference(in, mode);
}

}  // namespace brandsim
