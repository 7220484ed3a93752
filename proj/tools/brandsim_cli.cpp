// brandsim: brand similarity from followers' posts.
//
// Subcommands: validate, rank-tags, codebook, represent, similarity, evaluate,
// stability, synth, viz, run. Exit codes: 0 success, 1 processing or
// validation failure, 2 missing or unreadable file, CLI11 codes for bad usage.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "brandsim/error.hpp"
#include "brandsim/evaluation.hpp"
#include "brandsim/graph_export.hpp"
#include "brandsim/pipeline.hpp"
#include "brandsim/rng.hpp"
#include "brandsim/synth.hpp"
#include "brandsim/validation.hpp"

namespace fs = std::filesystem;
using namespace brandsim;

namespace {

// Raw flag values; applied on top of defaults (or a --config file) only when
// the flag was given on the command line.
struct PipelineFlags {
  std::string config_file;
  std::string corpus, tag_vectors, image_vectors, reference, out;
  std::string reference_mode = "counts";
  std::string mode = "tag", ranking = "freq", repr = "hist", measure = "hi";
  std::string tf_mode = "normalized", tag_weighting = "unweighted";
  std::size_t k = 500, top_n = 3000, l = 1000, batch_size = 1024, iterations = 100;
  std::size_t posts_per_user = 10, tag_dim = 100, image_dim = 2048;
  std::uint64_t seed = 0;
};

void add_pipeline_flags(CLI::App* app, PipelineFlags& f, bool with_config) {
  if (with_config) {
    app->add_option("--config", f.config_file, "Resolved config.json to start from");
  }
  app->add_option("--corpus", f.corpus, "Posts file (one JSON record per line)");
  app->add_option("--tag-vectors", f.tag_vectors, "Tag embedding vector file");
  app->add_option("--image-vectors", f.image_vectors, "Image feature vector file");
  app->add_option("--reference", f.reference, "Reference file user_id,brand_id[,value]");
  app->add_option("--reference-mode", f.reference_mode)->check(CLI::IsMember({"counts", "binary"}));
  app->add_option("--mode", f.mode)->check(CLI::IsMember({"image", "tag"}));
  app->add_option("--ranking", f.ranking)->check(CLI::IsMember({"freq", "score"}));
  app->add_option("--repr", f.repr)->check(CLI::IsMember({"hist", "avg"}));
  app->add_option("--measure", f.measure)->check(CLI::IsMember({"p", "hi"}));
  app->add_option("--k", f.k, "Codebook size")->check(CLI::PositiveNumber);
  app->add_option("--top-n", f.top_n, "Tags kept per brand")->check(CLI::PositiveNumber);
  app->add_option("--l", f.l, "Top-l cutoff for document frequency")->check(CLI::PositiveNumber);
  app->add_option("--batch-size", f.batch_size)->check(CLI::PositiveNumber);
  app->add_option("--iterations", f.iterations, "Mini-batch k-means passes")->check(CLI::PositiveNumber);
  app->add_option("--posts-per-user", f.posts_per_user)->check(CLI::PositiveNumber);
  app->add_option("--tag-dim", f.tag_dim)->check(CLI::PositiveNumber);
  app->add_option("--image-dim", f.image_dim)->check(CLI::PositiveNumber);
  app->add_option("--tf-mode", f.tf_mode)->check(CLI::IsMember({"normalized", "literal"}));
  app->add_option("--tag-weighting", f.tag_weighting)->check(CLI::IsMember({"unweighted", "user_count"}));
  app->add_option("--seed", f.seed, "Seed for every random stage");
  app->add_option("--out", f.out, "Output directory");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig resolve(const CLI::App* app, const PipelineFlags& f) {
  PipelineConfig c;
  if (!f.config_file.empty()) c = config_from_json(read_file(f.config_file));
  auto given = [app](const char* flag) { return app->count(flag) > 0; };

  if (given("--corpus")) c.corpus = f.corpus;
  if (given("--tag-vectors")) c.tag_vectors = f.tag_vectors;
  if (given("--image-vectors")) c.image_vectors = f.image_vectors;
  if (given("--reference")) c.reference = f.reference;
  if (given("--out")) c.out = f.out;
  if (given("--reference-mode")) c.reference_mode = parse_reference_mode(f.reference_mode);
  if (given("--mode")) c.mode = parse_feature_mode(f.mode);
  if (given("--ranking")) c.ranking = parse_ranking(f.ranking);
  if (given("--repr")) c.repr = parse_vector_kind(f.repr);
  if (given("--measure")) c.measure = parse_measure(f.measure);
  if (given("--k")) c.k = f.k;
  if (given("--top-n")) c.top_n = f.top_n;
  if (given("--l")) c.l = f.l;
  if (given("--batch-size")) c.batch_size = f.batch_size;
  if (given("--iterations")) c.iterations = f.iterations;
  if (given("--posts-per-user")) c.posts_per_user = f.posts_per_user;
  if (given("--tag-dim")) c.tag_dim = f.tag_dim;
  if (given("--image-dim")) c.image_dim = f.image_dim;
  if (given("--tf-mode")) c.tf_mode = f.tf_mode == "normalized" ? TfMode::kNormalized : TfMode::kLiteral;
  if (given("--tag-weighting")) {
    c.tag_weighting = f.tag_weighting == "unweighted" ? TagWeighting::kUnweighted : TagWeighting::kUserCount;
  }
  if (given("--seed")) c.seed = f.seed;
  return c;
}

void require(const fs::path& value, const char* flag) {
  if (value.empty()) throw Error(ErrorKind::kInvalidArgument, fmt::format("{} is required", flag));
}

// Inputs loaded for a pipeline stage; only the table for the mode is loaded.
struct Loaded {
  BrandCorpus corpus;
  std::optional<VectorTable> tags;
  std::optional<VectorTable> images;
  const VectorTable* tag_ptr() const { return tags ? &*tags : nullptr; }
  const VectorTable* image_ptr() const { return images ? &*images : nullptr; }
};

Loaded load_inputs(const PipelineConfig& c, bool both_tables = false) {
  require(c.corpus, "--corpus");
  Loaded in{load_corpus(c.corpus, c.posts_per_user), std::nullopt, std::nullopt};
  if (c.mode == FeatureMode::kTag || (both_tables && !c.tag_vectors.empty())) {
    require(c.tag_vectors, "--tag-vectors");
    in.tags = load_vectors(c.tag_vectors, c.tag_dim);
  }
  if (c.mode == FeatureMode::kImage || (both_tables && !c.image_vectors.empty())) {
    require(c.image_vectors, "--image-vectors");
    in.images = load_vectors(c.image_vectors, c.image_dim);
  }
  return in;
}

fs::path output_dir(const PipelineConfig& c) {
  const fs::path dir = c.out.empty() ? fs::path(".") : c.out;
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string feature_label(const PipelineConfig& c) {
  std::string label = to_string(c.mode);
  if (c.mode == FeatureMode::kTag) label += fmt::format("-{}", to_string(c.ranking));
  return label;
}

int cmd_validate(const PipelineConfig& c) {
  require(c.corpus, "--corpus");
  const auto corpus = load_corpus(c.corpus, c.posts_per_user);
  std::optional<VectorTable> tags, images;
  if (!c.tag_vectors.empty()) tags = load_vectors(c.tag_vectors, c.tag_dim);
  if (!c.image_vectors.empty()) images = load_vectors(c.image_vectors, c.image_dim);
  const auto report = validate_corpus(corpus, tags ? &*tags : nullptr, images ? &*images : nullptr);
  std::cout << format_report(report);
  return report.ok() ? 0 : 1;
}

int cmd_rank_tags(const PipelineConfig& c, const std::string& brand) {
  require(c.corpus, "--corpus");
  const auto corpus = load_corpus(c.corpus, c.posts_per_user);
  const RankingOptions options{c.ranking, c.top_n, c.l, c.tf_mode};
  if (!brand.empty() && c.out.empty()) {
    write_ranked_csv(rank_tags(corpus, brand, options), std::cout);
    return 0;
  }
  const auto dir = output_dir(c);
  for (const auto& list : rank_all_brands(corpus, options)) {
    if (!brand.empty() && list.brand_id != brand) continue;
    std::ofstream out(dir / fmt::format("tags_{}_{}.csv", to_string(c.ranking), list.brand_id));
    write_ranked_csv(list, out);
  }
  return 0;
}

std::vector<BrandItems> items_for(const Loaded& in, const PipelineConfig& c,
                                  std::vector<RankedTagList>& rankings) {
  if (c.mode == FeatureMode::kTag) {
    rankings = rank_all_brands(in.corpus, RankingOptions{c.ranking, c.top_n, c.l, c.tf_mode});
  }
  const RepresentationInputs inputs{c.mode, c.mode == FeatureMode::kTag ? in.tag_ptr() : in.image_ptr(),
                                    c.mode == FeatureMode::kTag ? &rankings : nullptr, c.tag_weighting};
  return collect_brand_items(in.corpus, inputs);
}

Codebook train(const std::vector<BrandItems>& items, const PipelineConfig& c) {
  return build_codebook(training_pool(items),
                        KMeansParams{c.k, mix_seed(c.seed, "codebook"), c.batch_size, c.iterations});
}

int cmd_codebook(const PipelineConfig& c) {
  const auto in = load_inputs(c);
  std::vector<RankedTagList> rankings;
  const auto codebook = train(items_for(in, c, rankings), c);
  const auto prefix = output_dir(c) / fmt::format("codebook_{}", feature_label(c));
  save_codebook(codebook, prefix);
  std::cout << fmt::format("wrote {}.bin ({} centroids, dim {})\n", prefix.string(), codebook.k,
                           codebook.dim);
  return 0;
}

int cmd_represent(const PipelineConfig& c, const std::string& codebook_prefix) {
  const auto in = load_inputs(c);
  std::vector<RankedTagList> rankings;
  const auto items = items_for(in, c, rankings);
  std::vector<BrandVector> vectors;
  Metadata meta{{"mode", to_string(c.mode)}, {"seed", std::to_string(c.seed)}};
  if (c.repr == VectorKind::kHistogram) {
    const auto codebook = codebook_prefix.empty() ? train(items, c) : load_codebook(codebook_prefix);
    if (codebook.dim != (c.mode == FeatureMode::kTag ? c.tag_dim : c.image_dim)) {
      throw Error(ErrorKind::kDimension, "codebook dimension does not match the feature vectors");
    }
    meta["k"] = std::to_string(codebook.k);
    vectors = histogram_representation(items, codebook);
  } else {
    vectors = average_representation(items);
  }
  const auto prefix =
      output_dir(c) / fmt::format("vectors_{}-{}", to_string(c.mode), to_string(c.repr));
  auto named = prefix;
  if (c.mode == FeatureMode::kTag) named += fmt::format("-{}", to_string(c.ranking));
  save_brand_vectors(vectors, named, meta);
  std::cout << fmt::format("wrote {}.bin ({} brands)\n", named.string(), vectors.size());
  return 0;
}

int cmd_similarity(const PipelineConfig& c, const std::string& vectors_prefix) {
  require(vectors_prefix, "--vectors");
  const auto vectors = load_brand_vectors(vectors_prefix);
  const auto matrix = similarity_matrix(vectors, c.measure);
  const auto stem = fs::path(vectors_prefix).filename().string();
  const auto label = (stem.rfind("vectors_", 0) == 0 ? stem.substr(8) : stem) + "-" + to_string(c.measure);
  const auto dir = output_dir(c);
  std::ofstream grid(dir / fmt::format("sim_{}.csv", label));
  write_matrix_csv(matrix, grid);
  std::ofstream pairs(dir / fmt::format("sim_{}_pairs.csv", label));
  write_pairs_csv(matrix, pairs);
  for (const auto& ex : matrix.excluded) {
    std::cerr << fmt::format("excluded {}: {}\n", ex.brand_id, ex.reason);
  }
  return 0;
}

Measure infer_measure(const std::string& path, const std::string& flag) {
  if (!flag.empty()) return parse_measure(flag);
  const auto stem = fs::path(path).stem().string();
  return stem.size() >= 3 && stem.compare(stem.size() - 3, 3, "-hi") == 0 ? Measure::kHistogramIntersection
                                                                         : Measure::kPearson;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Comma-separated list, or a file with one brand per line.
std::vector<std::string> brand_subset(const std::string& arg) {
  if (!fs::exists(arg)) return split_list(arg);
  auto text = read_file(arg);
  for (char& ch : text) {
    if (ch == '\n' || ch == '\r') ch = ',';
  }
  return split_list(text);
}

struct EvaluateFlags {
  std::vector<std::string> matrices;
  std::string matrix_b;
  std::string brands;
  std::string scope = "global";
  std::string summary;
};

int cmd_evaluate(const PipelineConfig& c, const EvaluateFlags& f) {
  if (f.matrices.empty()) throw Error(ErrorKind::kInvalidArgument, "--matrix is required");
  SimilarityMatrix reference;
  std::string reference_name;
  if (!f.matrix_b.empty()) {
    reference = load_matrix_csv(f.matrix_b, infer_measure(f.matrix_b, ""));
    reference_name = fs::path(f.matrix_b).stem().string();
  } else {
    require(c.reference, "--reference or --matrix-b");
    reference = reference_similarity(load_reference(c.reference, c.reference_mode));
    reference_name = c.reference.stem().string();
  }

  ComparisonOptions options;
  options.reference_name = reference_name;
  options.scope = f.scope == "per-brand" ? ComparisonScope::kPerBrand : ComparisonScope::kGlobal;
  if (!f.brands.empty()) {
    options.brand_filter = brand_subset(f.brands);
  }

  std::vector<ComparisonResult> results;
  for (const auto& path : f.matrices) {
    options.method_name = fs::path(path).stem().string();
    const auto matrix = load_matrix_csv(path, infer_measure(path, ""));
    results.push_back(compare_similarities(matrix, reference, options));
  }
  write_comparison_table(results, std::cout);
  if (!f.summary.empty()) write_file(f.summary, comparison_json(results, c));
  return 0;
}

int cmd_stability(const PipelineConfig& c, std::size_t repeats, const std::vector<std::size_t>& subsamples,
                  bool skip_split) {
  const auto in = load_inputs(c);
  const auto dir = output_dir(c);
  const auto label = method_label(c);
  const std::uint64_t seed = mix_seed(c.seed, "stability");
  if (!skip_split) {
    const auto r = split_half_stability(in.corpus, in.tag_ptr(), in.image_ptr(), c, repeats, seed);
    std::cout << fmt::format("{} split-half: mean rho {:.4f} over {} repeats\n", label, r.mean_rho,
                             r.repeats);
    write_file(dir / fmt::format("stability_{}_split-half.json", label),
               stability_json("split_half", r, c, seed));
  }
  for (std::size_t m : subsamples) {
    const auto r = subsample_stability(in.corpus, in.tag_ptr(), in.image_ptr(), c, m, repeats, seed);
    std::cout << fmt::format("{} subsample m={}: mean rho {:.4f} over {} repeats\n", label, m,
                             r.mean_rho, r.repeats);
    write_file(dir / fmt::format("stability_{}_subsample-{}.json", label, m),
               stability_json("subsample", r, c, seed, m));
  }
  return 0;
}

int cmd_viz(const std::string& matrix_path, const std::string& measure, double threshold,
            const std::string& out) {
  require(matrix_path, "--matrix");
  const auto matrix = load_matrix_csv(matrix_path, infer_measure(matrix_path, measure));
  const auto graph = export_visualization(matrix, threshold);
  for (const auto& w : graph.warnings) std::cerr << "warning: " << w << '\n';
  if (out.empty()) {
    std::cout << graph_to_json(graph);
  } else {
    write_file(out, graph_to_json(graph));
  }
  return 0;
}

int cmd_run(const PipelineConfig& c, bool grid) {
  require(c.out, "--out");
  const auto configs = grid ? method_grid(c) : std::vector<PipelineConfig>{c};
  for (const auto& cell : configs) {
    auto cell_config = cell;
    if (grid) cell_config.out = c.out / method_label(cell);
    const auto outputs = run_pipeline(cell_config);
    std::cout << fmt::format("{}: {} brands, {} excluded -> {}\n", outputs.label,
                             outputs.result.matrix.size(), outputs.result.matrix.excluded.size(),
                             cell_config.out.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brand similarity from followers' social-media posts"};
  app.require_subcommand(1);

  PipelineFlags flags;
  auto* validate = app.add_subcommand("validate", "Check a corpus against its vector tables");
  auto* rank = app.add_subcommand("rank-tags", "Rank tags per brand by frequency or tag score");
  auto* codebook = app.add_subcommand("codebook", "Train the shared k-means codebook");
  auto* represent = app.add_subcommand("represent", "Build brand vectors");
  auto* similarity = app.add_subcommand("similarity", "Pairwise similarity of brand vectors");
  auto* evaluate = app.add_subcommand("evaluate", "Spearman comparison of similarity matrices");
  auto* stability = app.add_subcommand("stability", "Split-half and subsample stability");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted groups");
  auto* viz = app.add_subcommand("viz", "Export a thresholded brand graph as JSON");
  auto* run = app.add_subcommand("run", "Full pipeline: ranking, representation, similarity");

  for (auto* sub : {validate, rank, codebook, represent, similarity, evaluate, stability, run}) {
    add_pipeline_flags(sub, flags, sub == run || sub == stability);
  }

  std::string brand;
  rank->add_option("--brand", brand, "Only this brand (prints to stdout unless --out is given)");

  std::string codebook_prefix;
  represent->add_option("--codebook", codebook_prefix, "Codebook prefix (trained when omitted)");

  std::string vectors_prefix;
  similarity->add_option("--vectors", vectors_prefix, "Brand vector prefix (<prefix>.bin/.meta)");

  EvaluateFlags eval_flags;
  evaluate->add_option("--matrix", eval_flags.matrices, "Method matrix CSV (repeatable)");
  evaluate->add_option("--matrix-b", eval_flags.matrix_b, "Compare against this matrix instead of --reference");
  evaluate->add_option("--brands", eval_flags.brands, "Brand subset: comma list or file");
  evaluate->add_option("--scope", eval_flags.scope)->check(CLI::IsMember({"global", "per-brand"}));
  evaluate->add_option("--summary", eval_flags.summary, "Write a JSON summary here");

  std::size_t repeats = 5;
  std::vector<std::size_t> subsamples;
  bool skip_split = false;
  stability->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  stability->add_option("--subsample", subsamples, "Followers per brand (repeatable)");
  stability->add_flag("--no-split-half", skip_split);

  SynthConfig synth_config;
  std::string synth_out = "synthetic";
  synth->add_option("--brands", synth_config.brands);
  synth->add_option("--groups", synth_config.groups);
  synth->add_option("--followers", synth_config.followers_per_brand);
  synth->add_option("--posts-per-user", synth_config.posts_per_user);
  synth->add_option("--tags-per-post", synth_config.tags_per_post);
  synth->add_option("--tag-vocab", synth_config.tag_vocab);
  synth->add_option("--core-tags", synth_config.core_tags_per_group);
  synth->add_option("--brand-tags", synth_config.brand_tags);
  synth->add_option("--tag-dim", synth_config.tag_dim);
  synth->add_option("--image-dim", synth_config.image_dim);
  synth->add_option("--overlap", synth_config.within_group_tag_overlap)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--spread", synth_config.affinity_spread, "Grade core affinity across a group's brands")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--background", synth_config.background_fraction)->check(CLI::Range(0.0, 1.0));
  synth->add_option("--noise", synth_config.noise);
  synth->add_option("--seed", synth_config.seed);
  synth->add_option("--out", synth_out);

  std::string viz_matrix, viz_measure, viz_out;
  double threshold = 0.5;
  viz->add_option("--matrix", viz_matrix, "Matrix CSV");
  viz->add_option("--measure", viz_measure, "p or hi (default: from the file name)")
      ->check(CLI::IsMember({"p", "hi"}));
  viz->add_option("--threshold", threshold, "Keep pairs with similarity >= threshold");
  viz->add_option("--out", viz_out, "Graph JSON path (stdout when omitted)");

  bool grid = false;
  run->add_flag("--grid", grid, "Run every cell of the method grid into <out>/<label>/");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto files = save_synthetic(generate_synthetic_corpus(synth_config), synth_out);
      for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
      return 0;
    }
    if (*viz) return cmd_viz(viz_matrix, viz_measure, threshold, viz_out);

    for (auto* sub : {validate, rank, codebook, represent, similarity, evaluate, stability, run}) {
      if (!*sub) continue;
      const auto config = resolve(sub, flags);
      check_config(config);
      if (sub == validate) return cmd_validate(config);
      if (sub == rank) return cmd_rank_tags(config, brand);
      if (sub == codebook) return cmd_codebook(config);
      if (sub == represent) return cmd_represent(config, codebook_prefix);
      if (sub == similarity) return cmd_similarity(config, vectors_prefix);
      if (sub == evaluate) return cmd_evaluate(config, eval_flags);
      if (sub == stability) return cmd_stability(config, repeats, subsamples, skip_split);
      if (sub == run) return cmd_run(config, grid);
    }
  } catch (const Error& e) {
    std::cerr << "brandsim: " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "brandsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
