#include "brandsim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/parallel.hpp"

namespace brandsim {
namespace {

// Centered copy and its norm; norm == 0 marks a constant vector.
struct Centered {
  std::vector<double> values;
  double norm = 0.0;
};

Centered center(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  Centered c{std::vector<double>(x.size()), 0.0};
  bool constant = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c.values[i] = x[i] - mean;
    c.norm += c.values[i] * c.values[i];
    constant = constant && x[i] == x[0];
  }
  c.norm = constant ? 0.0 : std::sqrt(c.norm);
  return c;
}

double correlation(const Centered& a, const Centered& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot / (a.norm * b.norm), -1.0, 1.0);
}

// L1-normalized copy; empty when the mass is zero.
std::vector<double> normalized(std::span<const double> h) {
  double mass = 0.0;
  for (double v : h) {
    if (v < 0.0) throw Error(ErrorKind::kInvalidArgument, "histogram has a negative bin");
    mass += v;
  }
  if (!(mass > 0.0)) return {};
  std::vector<double> out(h.begin(), h.end());
  for (double& v : out) v /= mass;
  return out;
}

double intersection(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::min(a[i], b[i]);
  return std::clamp(sum, 0.0, 1.0);
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::kDimension, fmt::format("vector lengths differ: {} vs {}", a, b));
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

const char* to_string(Measure measure) {
  return measure == Measure::kPearson ? "p" : "hi";
}

Measure parse_measure(std::string_view name) {
  if (name == "p" || name == "pearson") return Measure::kPearson;
  if (name == "hi" || name == "histogram_intersection") return Measure::kHistogramIntersection;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown measure '{}'", name));
}

std::optional<std::size_t> SimilarityMatrix::index_of(std::string_view brand_id) const {
  auto it = std::find(brands.begin(), brands.end(), brand_id);
  if (it == brands.end()) return std::nullopt;
  return static_cast<std::size_t>(it - brands.begin());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  if (x.size() < 2) throw Error(ErrorKind::kInvalidArgument, "pearson needs at least 2 values");
  const auto cx = center(x);
  const auto cy = center(y);
  if (cx.norm == 0.0 || cy.norm == 0.0) {
    throw Error(ErrorKind::kUndefined, "correlation undefined for a constant vector");
  }
  return correlation(cx, cy);
}

double histogram_intersection(std::span<const double> h1, std::span<const double> h2) {
  check_lengths(h1.size(), h2.size());
  const auto a = normalized(h1);
  const auto b = normalized(h2);
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::kUndefined, "histogram intersection undefined for a zero-mass histogram");
  }
  return intersection(a, b);
}

SimilarityMatrix similarity_matrix(const std::vector<std::string>& brand_ids,
                                   const std::vector<std::vector<double>>& rows, Measure measure) {
  if (brand_ids.size() != rows.size()) {
    throw Error(ErrorKind::kInvalidArgument, "brand ids and rows differ in count");
  }
  if (rows.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "similarity needs at least 2 brands");
  }
  for (const auto& row : rows) check_lengths(row.size(), rows.front().size());
  if (measure == Measure::kPearson && rows.front().size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "pearson needs vectors of length at least 2");
  }

  SimilarityMatrix m;
  m.measure = measure;
  std::vector<Centered> centered;
  std::vector<std::vector<double>> histograms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (measure == Measure::kPearson) {
      auto c = center(rows[i]);
      if (c.norm == 0.0) {
        m.excluded.push_back({brand_ids[i], "constant vector; correlation undefined"});
        continue;
      }
      centered.push_back(std::move(c));
    } else {
      auto h = normalized(rows[i]);
      if (h.empty()) {
        m.excluded.push_back({brand_ids[i], "zero-mass histogram"});
        continue;
      }
      histograms.push_back(std::move(h));
    }
    m.brands.push_back(brand_ids[i]);
  }

  const std::size_t n = m.brands.size();
  if (n < 2) {
    throw Error(ErrorKind::kUndefined,
                fmt::format("only {} brand(s) left after excluding {} undefined vector(s)", n,
                            m.excluded.size()));
  }

  m.values.assign(n * n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    m.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      m.at(i, j) = measure == Measure::kPearson ? correlation(centered[i], centered[j])
                                                : intersection(histograms[i], histograms[j]);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) m.at(j, i) = m.at(i, j);
  }
  return m;
}

SimilarityMatrix similarity_matrix(const std::vector<BrandVector>& vectors, Measure measure) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  ids.reserve(vectors.size());
  rows.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (measure == Measure::kHistogramIntersection && v.kind != VectorKind::kHistogram) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("histogram intersection requires histogram vectors; '{}' is {}",
                              v.brand_id, to_string(v.kind)));
    }
    ids.push_back(v.brand_id);
    rows.push_back(v.values);
  }
  return similarity_matrix(ids, rows, measure);
}

SimilarityMatrix restrict_to(const SimilarityMatrix& matrix, const std::vector<std::string>& brands) {
  std::vector<std::size_t> index;
  index.reserve(brands.size());
  for (const auto& b : brands) {
    auto i = matrix.index_of(b);
    if (!i) throw Error(ErrorKind::kInvalidArgument, fmt::format("brand '{}' not in matrix", b));
    index.push_back(*i);
  }
  SimilarityMatrix out;
  out.brands = brands;
  out.measure = matrix.measure;
  out.values.resize(brands.size() * brands.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = 0; j < index.size(); ++j) out.at(i, j) = matrix.at(index[i], index[j]);
  }
  return out;
}

void write_matrix_csv(const SimilarityMatrix& matrix, std::ostream& out) {
  std::string line;
  for (const auto& b : matrix.brands) line += "," + b;
  out << line << '\n';
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    line = matrix.brands[i];
    for (std::size_t j = 0; j < matrix.size(); ++j) line += fmt::format(",{:.6f}", matrix.at(i, j));
    out << line << '\n';
  }
}

void write_pairs_csv(const SimilarityMatrix& matrix, std::ostream& out) {
  out << "brand_a,brand_b,similarity\n";
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    for (std::size_t j = i + 1; j < matrix.size(); ++j) {
      out << fmt::format("{},{},{:.6f}\n", matrix.brands[i], matrix.brands[j], matrix.at(i, j));
    }
  }
}

SimilarityMatrix read_matrix_csv(std::istream& in, Measure measure) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kParse, "matrix file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv(line);
  if (header.size() < 2 || !header.front().empty()) {
    throw Error(ErrorKind::kParse, "matrix header must start with an empty cell");
  }

  SimilarityMatrix m;
  m.measure = measure;
  m.brands.assign(header.begin() + 1, header.end());
  const std::size_t n = m.brands.size();
  m.values.reserve(n * n);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (row >= n || fields.size() != n + 1 || fields[0] != m.brands[row]) {
      throw Error(ErrorKind::kParse, fmt::format("matrix row {} is malformed", row + 1));
    }
    for (std::size_t j = 1; j <= n; ++j) {
      try {
        m.values.push_back(std::stod(fields[j]));
      } catch (const std::exception&) {
        throw Error(ErrorKind::kParse, fmt::format("matrix row {}: bad value '{}'", row + 1, fields[j]));
      }
    }
    ++row;
  }
  if (row != n) throw Error(ErrorKind::kParse, fmt::format("matrix has {} rows, expected {}", row, n));
  return m;
}

SimilarityMatrix load_matrix_csv(const std::filesystem::path& path, Measure measure) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open matrix file '{}'", path.string()));
  return read_matrix_csv(in, measure);
}

}  // namespace brandsim
