#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "brandsim/corpus.hpp"
#include "brandsim/vector_table.hpp"

namespace brandsim {

enum class Severity { kWarning, kError };

struct Finding {
  Severity severity;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  std::size_t brands = 0;
  std::size_t users = 0;
  std::size_t posts = 0;
  std::size_t distinct_tags = 0;

  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool ok() const { return error_count() == 0; }
};

/// Checks corpus invariants and coverage against the vector tables. Posts whose
/// image vector is missing are errors; tags without an embedding are warnings
/// (those tags are skipped by embedding-dependent stages). A null table skips
/// the corresponding coverage check.
ValidationReport validate_corpus(const BrandCorpus& corpus, const VectorTable* tag_table,
                                 const VectorTable* image_table);

std::string format_report(const ValidationReport& report);

}  // namespace brandsim
