#include "brandsim/evaluation.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <set>

#include <fmt/core.h>
#include <json.hpp>

#include "brandsim/error.hpp"
#include "brandsim/parallel.hpp"
#include "brandsim/rng.hpp"

namespace brandsim {
namespace {

using nlohmann::ordered_json;

std::vector<double> upper_triangle(const SimilarityMatrix& m, const std::vector<std::size_t>& index) {
  std::vector<double> out;
  out.reserve(index.size() * (index.size() - 1) / 2);
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = i + 1; j < index.size(); ++j) out.push_back(m.at(index[i], index[j]));
  }
  return out;
}

double mean(const std::vector<double>& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

StabilityResult summarize(std::vector<double> rhos) {
  StabilityResult result;
  result.repeats = rhos.size();
  result.mean_rho = rhos.empty() ? 0.0 : mean(rhos);
  result.per_repeat_rho = std::move(rhos);
  return result;
}

void check_repeats(std::size_t repeats) {
  if (repeats == 0) throw Error(ErrorKind::kInvalidArgument, "repeats must be positive");
}

ordered_json config_params(const PipelineConfig& config) {
  return ordered_json{{"mode", to_string(config.mode)},
                      {"ranking", to_string(config.ranking)},
                      {"repr", to_string(config.repr)},
                      {"measure", to_string(config.measure)},
                      {"k", config.k},
                      {"top_n", config.top_n},
                      {"l", config.l}};
}

}  // namespace

SimilarityMatrix reference_similarity(const BrandUserMatrix& matrix) {
  if (matrix.brands.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "reference matrix needs at least 2 brands");
  }
  if (matrix.users.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "reference matrix needs at least 2 users");
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(matrix.brands.size());
  for (std::size_t b = 0; b < matrix.brands.size(); ++b) {
    const auto row = matrix.row(b);
    rows.emplace_back(row.begin(), row.end());
  }
  return similarity_matrix(matrix.brands, rows, Measure::kPearson);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kDimension,
                fmt::format("spearman inputs differ in length: {} vs {}", x.size(), y.size()));
  }
  if (x.size() < 2) throw Error(ErrorKind::kInvalidArgument, "spearman needs at least 2 values");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

ComparisonResult compare_similarities(const SimilarityMatrix& a, const SimilarityMatrix& b,
                                      const ComparisonOptions& options) {
  std::set<std::string> filter;
  if (options.brand_filter) filter.insert(options.brand_filter->begin(), options.brand_filter->end());

  ComparisonResult result{options.method_name, options.reference_name, 0.0, 0, {}};
  std::set<std::string> excluded;
  std::vector<std::size_t> ia;
  std::vector<std::size_t> ib;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& id = a.brands[i];
    if (options.brand_filter && !filter.count(id)) continue;
    if (auto j = b.index_of(id)) {
      ia.push_back(i);
      ib.push_back(*j);
    } else {
      excluded.insert(id);
    }
  }
  for (const auto& id : b.brands) {
    if (options.brand_filter && !filter.count(id)) continue;
    if (!a.index_of(id)) excluded.insert(id);
  }
  for (const auto* m : {&a, &b}) {
    for (const auto& ex : m->excluded) {
      if (!options.brand_filter || filter.count(ex.brand_id)) excluded.insert(ex.brand_id);
    }
  }
  result.excluded_brands.assign(excluded.begin(), excluded.end());

  const std::size_t n = ia.size();
  if (n < 3) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("comparison needs at least 3 common brands, found {}", n));
  }
  result.pairs_used = n * (n - 1) / 2;

  if (options.scope == ComparisonScope::kGlobal) {
    result.rho = spearman(upper_triangle(a, ia), upper_triangle(b, ib));
    return result;
  }

  std::vector<double> rhos;
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    x.clear();
    y.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      x.push_back(a.at(ia[i], ia[j]));
      y.push_back(b.at(ib[i], ib[j]));
    }
    try {
      rhos.push_back(spearman(x, y));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUndefined) throw;
    }
  }
  if (rhos.empty()) throw Error(ErrorKind::kUndefined, "no brand row has a defined rank correlation");
  result.rho = mean(rhos);
  return result;
}

std::pair<BrandCorpus, BrandCorpus> split_followers(const BrandCorpus& corpus, std::uint64_t seed) {
  std::vector<Brand> first;
  std::vector<Brand> second;
  const auto& brands = corpus.brands();
  for (std::size_t b = 0; b < brands.size(); ++b) {
    const auto& brand = brands[b];
    const std::size_t n = brand.followers.size();
    if (n < 2) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("brand '{}' has {} follower(s); a split needs at least 2", brand.id, n));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, b));
    rng.shuffle(order);
    const std::size_t half = (n + 1) / 2;
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());

    Brand a{brand.id, {}};
    Brand c{brand.id, {}};
    for (std::size_t i = 0; i < n; ++i) {
      (i < half ? a : c).followers.push_back(brand.followers[order[i]]);
    }
    first.push_back(std::move(a));
    second.push_back(std::move(c));
  }
  return {BrandCorpus::from_brands(std::move(first), corpus.posts_per_user()),
          BrandCorpus::from_brands(std::move(second), corpus.posts_per_user())};
}

BrandCorpus sample_followers(const BrandCorpus& corpus, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw Error(ErrorKind::kInvalidArgument, "subsample size must be positive");
  std::vector<Brand> sampled;
  const auto& brands = corpus.brands();
  for (std::size_t b = 0; b < brands.size(); ++b) {
    const auto& brand = brands[b];
    const std::size_t n = brand.followers.size();
    if (m > n) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("brand '{}' has {} followers, fewer than m={}", brand.id, n, m));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, b));
    rng.shuffle(order);
    order.resize(m);
    std::sort(order.begin(), order.end());
    Brand s{brand.id, {}};
    for (std::size_t i : order) s.followers.push_back(brand.followers[i]);
    sampled.push_back(std::move(s));
  }
  return BrandCorpus::from_brands(std::move(sampled), corpus.posts_per_user());
}

StabilityResult split_half_stability(const BrandCorpus& corpus, const VectorTable* tag_table,
                                     const VectorTable* image_table, const PipelineConfig& config,
                                     std::size_t repeats, std::uint64_t seed) {
  check_repeats(repeats);
  check_config(config);
  std::vector<double> rhos(repeats);
  parallel_for(repeats, [&](std::size_t r) {
    const auto [first, second] = split_followers(corpus, mix_seed(seed, r));
    const auto a = compute_similarity(first, tag_table, image_table, config);
    const auto b = compute_similarity(second, tag_table, image_table, config);
    rhos[r] = compare_similarities(a.matrix, b.matrix).rho;
  });
  return summarize(std::move(rhos));
}

StabilityResult subsample_stability(const BrandCorpus& corpus, const VectorTable* tag_table,
                                    const VectorTable* image_table, const PipelineConfig& config,
                                    std::size_t m, std::size_t repeats, std::uint64_t seed) {
  check_repeats(repeats);
  check_config(config);
  for (const auto& brand : corpus.brands()) {
    if (m > brand.followers.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  fmt::format("brand '{}' has {} followers, fewer than m={}", brand.id,
                              brand.followers.size(), m));
    }
  }
  const auto full = compute_similarity(corpus, tag_table, image_table, config);
  std::vector<double> rhos(repeats);
  parallel_for(repeats, [&](std::size_t r) {
    const auto sample = sample_followers(corpus, m, mix_seed(seed, r));
    const auto part = compute_similarity(sample, tag_table, image_table, config);
    rhos[r] = compare_similarities(part.matrix, full.matrix).rho;
  });
  return summarize(std::move(rhos));
}

void write_comparison_table(const std::vector<ComparisonResult>& results, std::ostream& out) {
  out << fmt::format("{:<24} {:<24} {:>8} {:>10} {}\n", "method", "reference", "rho", "pairs",
                     "excluded");
  for (const auto& r : results) {
    std::string excluded;
    for (const auto& b : r.excluded_brands) excluded += (excluded.empty() ? "" : ";") + b;
    out << fmt::format("{:<24} {:<24} {:>8.4f} {:>10} {}\n", r.method_name, r.reference_name, r.rho,
                       r.pairs_used, excluded.empty() ? "-" : excluded);
  }
}

std::string comparison_json(const std::vector<ComparisonResult>& results,
                            const PipelineConfig& config) {
  ordered_json out = ordered_json::array();
  for (const auto& r : results) {
    out.push_back(ordered_json{{"method", r.method_name},
                               {"reference", r.reference_name},
                               {"rho", r.rho},
                               {"pairs_used", r.pairs_used},
                               {"excluded_brands", r.excluded_brands},
                               {"parameters", config_params(config)},
                               {"seed", config.seed}});
  }
  return out.dump(2) + "\n";
}

std::string stability_json(const std::string& protocol, const StabilityResult& result,
                           const PipelineConfig& config, std::uint64_t seed,
                           std::optional<std::size_t> m) {
  ordered_json out{{"protocol", protocol},
                   {"method", method_label(config)},
                   {"repeats", result.repeats},
                   {"per_repeat_rho", result.per_repeat_rho},
                   {"mean_rho", result.mean_rho},
                   {"parameters", config_params(config)},
                   {"seed", seed}};
  if (m) out["m"] = *m;
  return out.dump(2) + "\n";
}

}  // namespace brandsim
