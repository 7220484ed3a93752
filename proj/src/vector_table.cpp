#include "brandsim/vector_table.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/core.h>

#include "brandsim/error.hpp"

namespace brandsim {
namespace {

constexpr std::string_view kMagic = "BSIMVEC1";

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void write_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

bool is_blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

VectorTable parse_binary(std::string_view bytes, std::size_t expected_dim) {
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  std::size_t pos = kMagic.size();
  if (bytes.size() < pos + 4) throw Error(ErrorKind::kParse, "binary vector file: truncated header");
  const std::size_t dim = read_u32(data + pos);
  pos += 4;
  if (dim != expected_dim) {
    throw Error(ErrorKind::kDimension,
                fmt::format("vector dimension mismatch: found {}, expected {}", dim, expected_dim));
  }

  VectorTable table(dim);
  std::vector<float> values(dim);
  std::size_t record = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 2) {
      throw Error(ErrorKind::kParse, fmt::format("binary vector file: record {} truncated", record));
    }
    const std::size_t id_len = static_cast<std::size_t>(data[pos]) | (static_cast<std::size_t>(data[pos + 1]) << 8);
    pos += 2;
    if (bytes.size() - pos < id_len + 4 * dim) {
      throw Error(ErrorKind::kParse, fmt::format("binary vector file: record {} truncated", record));
    }
    std::string id(bytes.substr(pos, id_len));
    pos += id_len;
    for (std::size_t k = 0; k < dim; ++k, pos += 4) {
      values[k] = std::bit_cast<float>(read_u32(data + pos));
    }
    table.add(std::move(id), values);
    ++record;
  }
  return table;
}

VectorTable parse_text(std::string_view text, std::size_t expected_dim) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  VectorTable table(expected_dim);
  std::vector<float> values(expected_dim);

  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (is_blank(line)) continue;

    const auto fields = split_ws(line);
    if (!header_seen) {
      std::size_t dim = 0;
      if (fields.size() != 2 || fields[0] != "dim" ||
          std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), dim).ec !=
              std::errc{}) {
        throw Error(ErrorKind::kParse, fmt::format("line {}: expected header 'dim <d>'", line_no));
      }
      if (dim != expected_dim) {
        throw Error(ErrorKind::kDimension,
                    fmt::format("vector dimension mismatch: found {}, expected {}", dim, expected_dim));
      }
      header_seen = true;
      continue;
    }

    const std::string id(fields[0]);
    if (fields.size() - 1 != expected_dim) {
      throw Error(ErrorKind::kDimension,
                  fmt::format("line {}: record '{}' has {} values, expected {}", line_no, id,
                              fields.size() - 1, expected_dim));
    }
    for (std::size_t k = 0; k < expected_dim; ++k) {
      const auto field = fields[k + 1];
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), values[k]);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw Error(ErrorKind::kParse,
                    fmt::format("line {}: record '{}': bad number '{}'", line_no, id, field));
      }
    }
    table.add(id, values);
  }
  return table;
}

}  // namespace

VectorTable::VectorTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::kInvalidArgument, "vector dimension must be positive");
}

void VectorTable::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorKind::kDimension,
                fmt::format("record '{}': found {} values, expected {}", id, values.size(), dim_));
  }
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kValidation, fmt::format("record '{}': non-finite value", id));
    }
  }
  if (index_.count(id) != 0) {
    throw Error(ErrorKind::kValidation, fmt::format("duplicate vector id '{}'", id));
  }
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

std::optional<std::span<const float>> VectorTable::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

VectorTable parse_vectors(std::istream& in, std::size_t expected_dim) {
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.compare(0, kMagic.size(), kMagic) == 0) return parse_binary(bytes, expected_dim);
  if (is_blank(bytes)) return VectorTable(expected_dim);
  return parse_text(bytes, expected_dim);
}

VectorTable load_vectors(const std::filesystem::path& path, std::size_t expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open vector file '{}'", path.string()));
  return parse_vectors(in, expected_dim);
}

void write_vectors(const VectorTable& table, std::ostream& out, VectorFormat format) {
  if (format == VectorFormat::kBinary) {
    out.write(kMagic.data(), static_cast<std::streamsize>(kMagic.size()));
    write_u32(out, static_cast<std::uint32_t>(table.dim()));
    for (std::size_t i = 0; i < table.size(); ++i) {
      const auto& id = table.ids()[i];
      if (id.size() > 0xFFFF) {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("vector id too long: '{}'", id));
      }
      const char len[2] = {static_cast<char>(id.size() & 0xFF),
                           static_cast<char>((id.size() >> 8) & 0xFF)};
      out.write(len, 2);
      out.write(id.data(), static_cast<std::streamsize>(id.size()));
      for (float v : table.row(i)) write_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return;
  }

  out << "dim " << table.dim() << '\n';
  std::string line;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& id = table.ids()[i];
    if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("vector id '{}' cannot be written in the text format", id));
    }
    line = id;
    for (float v : table.row(i)) fmt::format_to(std::back_inserter(line), " {}", v);
    line += '\n';
    out << line;
  }
}

void save_vectors(const VectorTable& table, const std::filesystem::path& path,
                  VectorFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  write_vectors(table, out, format);
}

}  // namespace brandsim
