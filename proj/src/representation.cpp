#include "brandsim/representation.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/parallel.hpp"

namespace brandsim {
namespace {

void check_inputs(const BrandCorpus& corpus, const RepresentationInputs& inputs) {
  if (inputs.table == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("{} vector table is required", to_string(inputs.mode)));
  }
  if (inputs.mode == FeatureMode::kTag) {
    if (inputs.rankings == nullptr) {
      throw Error(ErrorKind::kInvalidArgument, "tag mode requires per-brand tag rankings");
    }
    if (inputs.rankings->size() != corpus.brand_count()) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("{} tag rankings for {} brands", inputs.rankings->size(),
                              corpus.brand_count()));
    }
  }
}

BrandItems image_items(const Brand& brand, const VectorTable& table) {
  BrandItems items{brand.id, {}, {}, {}};
  for (const auto& follower : brand.followers) {
    for (const auto& post : follower.posts) {
      if (!post.image_vector_id) continue;
      if (auto v = table.find(*post.image_vector_id)) {
        items.ids.push_back(*post.image_vector_id);
        items.vectors.push_back(*v);
        items.weights.push_back(1.0);
      }
    }
  }
  return items;
}

BrandItems tag_items(const Brand& brand, const RankedTagList& ranking, const VectorTable& table,
                     TagWeighting weighting) {
  if (ranking.brand_id != brand.id) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("ranking for '{}' given where '{}' expected", ranking.brand_id, brand.id));
  }
  std::map<std::string_view, double> users;
  if (weighting == TagWeighting::kUserCount) {
    std::vector<std::string_view> seen;
    for (const auto& follower : brand.followers) {
      seen.clear();
      for (const auto& post : follower.posts) seen.insert(seen.end(), post.tags.begin(), post.tags.end());
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (auto tag : seen) users[tag] += 1.0;
    }
  }

  BrandItems items{brand.id, {}, {}, {}};
  for (const auto& entry : ranking.entries) {
    if (auto v = table.find(entry.tag)) {
      items.ids.push_back(entry.tag);
      items.vectors.push_back(*v);
      items.weights.push_back(weighting == TagWeighting::kUserCount ? users[entry.tag] : 1.0);
    }
  }
  return items;
}

}  // namespace

const char* to_string(FeatureMode mode) { return mode == FeatureMode::kImage ? "image" : "tag"; }

const char* to_string(VectorKind kind) {
  return kind == VectorKind::kHistogram ? "hist" : "avg";
}

std::vector<BrandItems> collect_brand_items(const BrandCorpus& corpus,
                                            const RepresentationInputs& inputs) {
  check_inputs(corpus, inputs);
  const auto& brands = corpus.brands();
  std::vector<BrandItems> out(brands.size());
  parallel_for(brands.size(), [&](std::size_t i) {
    out[i] = inputs.mode == FeatureMode::kImage
                 ? image_items(brands[i], *inputs.table)
                 : tag_items(brands[i], (*inputs.rankings)[i], *inputs.table, inputs.weighting);
  });
  return out;
}

PointSet training_pool(const std::vector<BrandItems>& items) {
  std::map<std::string_view, std::span<const float>> distinct;
  std::size_t dim = 0;
  for (const auto& brand : items) {
    for (std::size_t i = 0; i < brand.ids.size(); ++i) {
      distinct.emplace(brand.ids[i], brand.vectors[i]);
      dim = brand.vectors[i].size();
    }
  }
  PointSet pool(dim);
  for (const auto& [id, v] : distinct) pool.add(v);
  return pool;
}

std::vector<BrandVector> histogram_representation(const std::vector<BrandItems>& items,
                                                  const Codebook& codebook) {
  std::vector<BrandVector> out(items.size());
  parallel_for(items.size(), [&](std::size_t b) {
    const auto& brand = items[b];
    BrandVector vec{brand.brand_id, VectorKind::kHistogram, std::vector<double>(codebook.k, 0.0),
                    brand.vectors.size()};
    for (std::size_t i = 0; i < brand.vectors.size(); ++i) {
      vec.values[assign_cluster(codebook, brand.vectors[i])] += brand.weights[i];
    }
    out[b] = std::move(vec);
  });
  return out;
}

std::vector<BrandVector> histogram_representation(const BrandCorpus& corpus,
                                                  const Codebook& codebook,
                                                  const RepresentationInputs& inputs) {
  check_inputs(corpus, inputs);
  if (inputs.table->dim() != codebook.dim) {
    throw Error(ErrorKind::kDimension,
                fmt::format("codebook dimension {} does not match {} vectors of dimension {}",
                            codebook.dim, to_string(inputs.mode), inputs.table->dim()));
  }
  return histogram_representation(collect_brand_items(corpus, inputs), codebook);
}

std::vector<BrandVector> average_representation(const std::vector<BrandItems>& items) {
  std::vector<BrandVector> out(items.size());
  parallel_for(items.size(), [&](std::size_t b) {
    const auto& brand = items[b];
    if (brand.vectors.empty()) {
      throw Error(ErrorKind::kUndefined,
                  fmt::format("brand '{}' has no representable items", brand.brand_id));
    }
    const std::size_t dim = brand.vectors.front().size();
    BrandVector vec{brand.brand_id, VectorKind::kAverage, std::vector<double>(dim, 0.0),
                    brand.vectors.size()};
    for (const auto& v : brand.vectors) {
      for (std::size_t d = 0; d < dim; ++d) vec.values[d] += v[d];
    }
    for (double& x : vec.values) x /= static_cast<double>(brand.vectors.size());
    out[b] = std::move(vec);
  });
  return out;
}

std::vector<BrandVector> average_representation(const BrandCorpus& corpus,
                                                const RepresentationInputs& inputs) {
  return average_representation(collect_brand_items(corpus, inputs));
}

void save_metadata(const Metadata& meta, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  for (const auto& [key, value] : meta) out << key << '=' << value << '\n';
}

Metadata load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open metadata file '{}'", path.string()));
  Metadata meta;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, fmt::format("{}:{}: expected key=value", path.string(), line_no));
    }
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

void save_brand_vectors(const std::vector<BrandVector>& vectors,
                        const std::filesystem::path& prefix, const Metadata& extra) {
  if (vectors.empty()) throw Error(ErrorKind::kInvalidArgument, "no brand vectors to save");
  const std::size_t dim = vectors.front().values.size();
  VectorTable table(dim);
  Metadata meta = extra;
  meta["kind"] = to_string(vectors.front().kind);
  meta["dim"] = std::to_string(dim);
  meta["brands"] = std::to_string(vectors.size());
  std::vector<float> row(dim);
  for (const auto& v : vectors) {
    if (v.kind != vectors.front().kind) {
      throw Error(ErrorKind::kInvalidArgument, "brand vectors of mixed kinds");
    }
    std::transform(v.values.begin(), v.values.end(), row.begin(),
                   [](double x) { return static_cast<float>(x); });
    table.add(v.brand_id, row);
    meta["items." + v.brand_id] = std::to_string(v.item_count);
  }
  auto bin = prefix;
  bin += ".bin";
  save_vectors(table, bin, VectorFormat::kBinary);
  auto meta_path = prefix;
  meta_path += ".meta";
  save_metadata(meta, meta_path);
}

std::vector<BrandVector> load_brand_vectors(const std::filesystem::path& prefix) {
  auto meta_path = prefix;
  meta_path += ".meta";
  const auto meta = load_metadata(meta_path);
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw Error(ErrorKind::kParse, fmt::format("{}: missing key '{}'", meta_path.string(), key));
    }
    return it->second;
  };

  const auto& kind_name = get("kind");
  if (kind_name != "hist" && kind_name != "avg") {
    throw Error(ErrorKind::kParse, fmt::format("{}: unknown kind '{}'", meta_path.string(), kind_name));
  }
  const VectorKind kind = kind_name == "hist" ? VectorKind::kHistogram : VectorKind::kAverage;
  auto bin = prefix;
  bin += ".bin";
  const auto table = load_vectors(bin, std::stoull(get("dim")));

  std::vector<BrandVector> out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto row = table.row(i);
    out.push_back({table.ids()[i], kind, std::vector<double>(row.begin(), row.end()),
                   std::stoull(get("items." + table.ids()[i]))});
  }
  return out;
}

}  // namespace brandsim
