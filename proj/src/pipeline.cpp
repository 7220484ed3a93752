#include "brandsim/pipeline.hpp"

#include <fstream>

#include <fmt/core.h>
#include <json.hpp>

#include "brandsim/error.hpp"
#include "brandsim/evaluation.hpp"
#include "brandsim/rng.hpp"
#include "brandsim/validation.hpp"

namespace brandsim {
namespace {

using nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& created) {
  created.push_back(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw Error(ErrorKind::kIo, fmt::format("write failed for '{}'", path.string()));
}

template <typename Writer>
void write_stream(const std::filesystem::path& path, Writer&& writer,
                  std::vector<std::filesystem::path>& created) {
  created.push_back(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  writer(out);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("write failed for '{}'", path.string()));
}

const char* tf_mode_name(TfMode mode) {
  return mode == TfMode::kNormalized ? "normalized" : "literal";
}

const char* weighting_name(TagWeighting w) {
  return w == TagWeighting::kUnweighted ? "unweighted" : "user_count";
}

const char* reference_mode_name(ReferenceMode mode) {
  return mode == ReferenceMode::kCounts ? "counts" : "binary";
}

}  // namespace

FeatureMode parse_feature_mode(std::string_view name) {
  if (name == "image") return FeatureMode::kImage;
  if (name == "tag") return FeatureMode::kTag;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown mode '{}'", name));
}

RankingMethod parse_ranking(std::string_view name) {
  if (name == "freq" || name == "frequency") return RankingMethod::kFrequency;
  if (name == "score") return RankingMethod::kScore;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown ranking '{}'", name));
}

VectorKind parse_vector_kind(std::string_view name) {
  if (name == "hist" || name == "histogram") return VectorKind::kHistogram;
  if (name == "avg" || name == "average") return VectorKind::kAverage;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown representation '{}'", name));
}

ReferenceMode parse_reference_mode(std::string_view name) {
  if (name == "counts") return ReferenceMode::kCounts;
  if (name == "binary") return ReferenceMode::kBinary;
  throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown reference mode '{}'", name));
}

std::string method_label(const PipelineConfig& config) {
  std::string label = fmt::format("{}-{}", to_string(config.mode), to_string(config.repr));
  if (config.mode == FeatureMode::kTag) label += fmt::format("-{}", to_string(config.ranking));
  label += fmt::format("-{}", to_string(config.measure));
  return label;
}

void check_config(const PipelineConfig& config) {
  if (config.repr == VectorKind::kAverage && config.measure == Measure::kHistogramIntersection) {
    throw Error(ErrorKind::kInvalidArgument,
                "histogram intersection applies to histogram representations only");
  }
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorKind::kInvalidArgument, fmt::format("{} must be positive", name));
  };
  positive(config.k, "k");
  positive(config.top_n, "top_n");
  positive(config.l, "l");
  positive(config.batch_size, "batch_size");
  positive(config.iterations, "iterations");
  positive(config.posts_per_user, "posts_per_user");
  positive(config.tag_dim, "tag_dim");
  positive(config.image_dim, "image_dim");
}

std::string config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["corpus"] = c.corpus.string();
  j["tag_vectors"] = c.tag_vectors.string();
  j["image_vectors"] = c.image_vectors.string();
  j["reference"] = c.reference.string();
  j["reference_mode"] = reference_mode_name(c.reference_mode);
  j["mode"] = to_string(c.mode);
  j["ranking"] = to_string(c.ranking);
  j["repr"] = to_string(c.repr);
  j["measure"] = to_string(c.measure);
  j["k"] = c.k;
  j["top_n"] = c.top_n;
  j["l"] = c.l;
  j["batch_size"] = c.batch_size;
  j["iterations"] = c.iterations;
  j["posts_per_user"] = c.posts_per_user;
  j["tag_dim"] = c.tag_dim;
  j["image_dim"] = c.image_dim;
  j["tf_mode"] = tf_mode_name(c.tf_mode);
  j["tag_weighting"] = weighting_name(c.tag_weighting);
  j["seed"] = c.seed;
  j["out"] = c.out.string();
  return j.dump(2) + "\n";
}

PipelineConfig config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw Error(ErrorKind::kParse, fmt::format("config: {}", e.what()));
  }
  PipelineConfig c;
  try {
    auto str = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::string>();
    };
    auto num = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    std::string corpus, tags, images, reference, out;
    str("corpus", corpus);
    str("tag_vectors", tags);
    str("image_vectors", images);
    str("reference", reference);
    str("out", out);
    c.corpus = corpus;
    c.tag_vectors = tags;
    c.image_vectors = images;
    c.reference = reference;
    c.out = out;
    if (j.contains("reference_mode")) c.reference_mode = parse_reference_mode(j["reference_mode"].get<std::string>());
    if (j.contains("mode")) c.mode = parse_feature_mode(j["mode"].get<std::string>());
    if (j.contains("ranking")) c.ranking = parse_ranking(j["ranking"].get<std::string>());
    if (j.contains("repr")) c.repr = parse_vector_kind(j["repr"].get<std::string>());
    if (j.contains("measure")) c.measure = parse_measure(j["measure"].get<std::string>());
    num("k", c.k);
    num("top_n", c.top_n);
    num("l", c.l);
    num("batch_size", c.batch_size);
    num("iterations", c.iterations);
    num("posts_per_user", c.posts_per_user);
    num("tag_dim", c.tag_dim);
    num("image_dim", c.image_dim);
    num("seed", c.seed);
    if (j.contains("tf_mode")) {
      const auto v = j["tf_mode"].get<std::string>();
      if (v != "normalized" && v != "literal") {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown tf_mode '{}'", v));
      }
      c.tf_mode = v == "normalized" ? TfMode::kNormalized : TfMode::kLiteral;
    }
    if (j.contains("tag_weighting")) {
      const auto v = j["tag_weighting"].get<std::string>();
      if (v != "unweighted" && v != "user_count") {
        throw Error(ErrorKind::kInvalidArgument, fmt::format("unknown tag_weighting '{}'", v));
      }
      c.tag_weighting = v == "unweighted" ? TagWeighting::kUnweighted : TagWeighting::kUserCount;
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorKind::kParse, fmt::format("config: {}", e.what()));
  }
  return c;
}

std::vector<PipelineConfig> method_grid(const PipelineConfig& base) {
  std::vector<PipelineConfig> grid;
  auto add = [&](FeatureMode mode, VectorKind repr, RankingMethod ranking, Measure measure) {
    PipelineConfig c = base;
    c.mode = mode;
    c.repr = repr;
    c.ranking = ranking;
    c.measure = measure;
    grid.push_back(std::move(c));
  };
  for (Measure m : {Measure::kPearson, Measure::kHistogramIntersection}) {
    add(FeatureMode::kImage, VectorKind::kHistogram, base.ranking, m);
  }
  add(FeatureMode::kImage, VectorKind::kAverage, base.ranking, Measure::kPearson);
  for (RankingMethod r : {RankingMethod::kFrequency, RankingMethod::kScore}) {
    for (Measure m : {Measure::kPearson, Measure::kHistogramIntersection}) {
      add(FeatureMode::kTag, VectorKind::kHistogram, r, m);
    }
  }
  for (RankingMethod r : {RankingMethod::kFrequency, RankingMethod::kScore}) {
    add(FeatureMode::kTag, VectorKind::kAverage, r, Measure::kPearson);
  }
  return grid;
}

PipelineResult compute_similarity(const BrandCorpus& corpus, const VectorTable* tag_table,
                                  const VectorTable* image_table, const PipelineConfig& config) {
  check_config(config);
  const VectorTable* table = config.mode == FeatureMode::kImage ? image_table : tag_table;
  if (table == nullptr) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("{} vectors are required for {}", to_string(config.mode),
                            method_label(config)));
  }

  PipelineResult result;
  if (config.mode == FeatureMode::kTag) {
    result.rankings = rank_all_brands(
        corpus, RankingOptions{config.ranking, config.top_n, config.l, config.tf_mode});
  }

  const RepresentationInputs inputs{config.mode, table,
                                    config.mode == FeatureMode::kTag ? &result.rankings : nullptr,
                                    config.tag_weighting};
  const auto items = collect_brand_items(corpus, inputs);
  if (config.repr == VectorKind::kHistogram) {
    const KMeansParams params{config.k, mix_seed(config.seed, "codebook"), config.batch_size,
                              config.iterations};
    result.codebook = build_codebook(training_pool(items), params);
    result.vectors = histogram_representation(items, *result.codebook);
  } else {
    result.vectors = average_representation(items);
  }
  result.matrix = similarity_matrix(result.vectors, config.measure);
  return result;
}

RunOutputs run_pipeline(const PipelineConfig& config) {
  check_config(config);
  RunOutputs outputs;
  outputs.label = method_label(config);

  const BrandCorpus corpus = load_corpus(config.corpus, config.posts_per_user);
  std::optional<VectorTable> table;
  if (config.mode == FeatureMode::kImage) {
    if (config.image_vectors.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "image mode needs --image-vectors");
    }
    table = load_vectors(config.image_vectors, config.image_dim);
  } else {
    if (config.tag_vectors.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "tag mode needs --tag-vectors");
    }
    table = load_vectors(config.tag_vectors, config.tag_dim);
  }
  const VectorTable* tags = config.mode == FeatureMode::kTag ? &*table : nullptr;
  const VectorTable* images = config.mode == FeatureMode::kImage ? &*table : nullptr;

  const auto report = validate_corpus(corpus, tags, images);
  if (!report.ok()) {
    const auto& first = *std::find_if(report.findings.begin(), report.findings.end(),
                                      [](const Finding& f) { return f.severity == Severity::kError; });
    throw Error(ErrorKind::kValidation,
                fmt::format("corpus failed validation with {} error(s); first: {}: {}",
                            report.error_count(), first.location, first.message));
  }

  std::optional<BrandUserMatrix> reference;
  if (!config.reference.empty()) reference = load_reference(config.reference, config.reference_mode);

  outputs.result = compute_similarity(corpus, tags, images, config);
  const auto& result = outputs.result;

  std::error_code ec;
  const bool created_dir = !std::filesystem::exists(config.out);
  std::filesystem::create_directories(config.out, ec);
  if (ec) {
    throw Error(ErrorKind::kIo, fmt::format("cannot create '{}': {}", config.out.string(), ec.message()));
  }

  auto& files = outputs.files;
  try {
    const auto dir = config.out;
    write_text(dir / "config.json", config_to_json(config), files);
    write_stream(dir / fmt::format("sim_{}.csv", outputs.label),
                 [&](std::ostream& o) { write_matrix_csv(result.matrix, o); }, files);
    write_stream(dir / fmt::format("sim_{}_pairs.csv", outputs.label),
                 [&](std::ostream& o) { write_pairs_csv(result.matrix, o); }, files);

    Metadata meta{{"label", outputs.label},
                  {"seed", std::to_string(config.seed)},
                  {"mode", to_string(config.mode)}};
    const auto vectors_prefix = dir / fmt::format("vectors_{}", outputs.label);
    files.push_back(dir / fmt::format("vectors_{}.bin", outputs.label));
    files.push_back(dir / fmt::format("vectors_{}.meta", outputs.label));
    save_brand_vectors(result.vectors, vectors_prefix, meta);

    if (result.codebook) {
      files.push_back(dir / fmt::format("codebook_{}.bin", outputs.label));
      files.push_back(dir / fmt::format("codebook_{}.meta", outputs.label));
      save_codebook(*result.codebook, dir / fmt::format("codebook_{}", outputs.label));
    }

    Metadata run_meta{{"label", outputs.label},
                      {"brands", std::to_string(corpus.brand_count())},
                      {"users", std::to_string(report.users)},
                      {"posts", std::to_string(report.posts)},
                      {"validation_warnings", std::to_string(report.warning_count())},
                      {"matrix_brands", std::to_string(result.matrix.size())},
                      {"excluded_brands", std::to_string(result.matrix.excluded.size())},
                      {"seed", std::to_string(config.seed)}};
    if (result.codebook) run_meta["codebook_seed"] = std::to_string(result.codebook->params.seed);
    for (const auto& ex : result.matrix.excluded) run_meta["excluded." + ex.brand_id] = ex.reason;
    if (config.tag_weighting == TagWeighting::kUserCount) {
      run_meta["note"] = "tag histograms weighted by follower counts";
    }
    files.push_back(dir / fmt::format("metadata_{}.txt", outputs.label));
    save_metadata(run_meta, files.back());

    if (reference) {
      const auto ref = reference_similarity(*reference);
      const auto comparison = compare_similarities(
          result.matrix, ref, {outputs.label, config.reference.filename().string(), std::nullopt,
                               ComparisonScope::kGlobal});
      write_text(dir / fmt::format("comparison_{}.json", outputs.label),
                 comparison_json({comparison}, config), files);
    }
  } catch (...) {
    for (const auto& f : files) std::filesystem::remove(f, ec);
    if (created_dir) std::filesystem::remove(config.out, ec);
    files.clear();
    throw;
  }
  return outputs;
}

}  // namespace brandsim
