#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace brandsim {

/// id -> dense float vector of a fixed dimension.
class VectorTable {
 public:
  explicit VectorTable(std::size_t dim = 1);

  /// Appends a record. Throws kDimension on a length mismatch, kValidation on a
  /// non-finite component or a duplicate id.
  void add(std::string id, std::span<const float> values);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::span<const float> row(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  std::optional<std::span<const float>> find(std::string_view id) const;
  bool contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

  bool operator==(const VectorTable& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && data_ == other.data_;
  }

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class VectorFormat { kText, kBinary };

/// Loads the text (`dim <d>` header) or binary (`BSIMVEC1` magic) vector format,
/// detected from the first bytes. An empty file is a valid empty table.
VectorTable load_vectors(const std::filesystem::path& path, std::size_t expected_dim);
VectorTable parse_vectors(std::istream& in, std::size_t expected_dim);

void write_vectors(const VectorTable& table, std::ostream& out, VectorFormat format);
void save_vectors(const VectorTable& table, const std::filesystem::path& path,
                  VectorFormat format);

}  // namespace brandsim
