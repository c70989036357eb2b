#pragma once

// Ratings CSV ingestion and the shared lexical resources (suffix list,
// language model, character model) every stage of the pipeline needs.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "lexdom/corpus.hpp"
#include "lexdom/features.hpp"
#include "lexdom/psl.hpp"
#include "lexdom/segmenter.hpp"

namespace lexdom {

struct ResourcePaths {
  std::string psl;
  std::string unigrams;
  std::string bigrams;
  std::size_t unigram_limit = corpus::kDefaultUnigramLimit;
  bool include_private_suffixes = true;
  corpus::CharMarkovOptions markov;
};

/// Immutable after construction; safe to share across threads.
struct Resources {
  psl::SuffixRuleSet suffixes;
  corpus::LanguageModel language;
  corpus::CharMarkovModel markov;
  std::size_t max_token_len = segmenter::kDefaultMaxTokenLen;

  static Resources load(const ResourcePaths& paths);
};

enum class Source { kCellular, kDirectory };

std::string_view to_string(Source s);

struct DomainRecord {
  std::string raw;
  psl::DomainName parsed;
  std::vector<std::string> tokens;
  std::optional<int> rating;
  std::optional<int> confidence;
  Source source = Source::kCellular;
  std::optional<int> label;  ///< 1 malicious, 0 safe
};

inline constexpr int kMaliciousBelow = 60;

/// Directory rows are safe; rated rows are malicious iff rating < 60;
/// unrated cellular rows are unlabeled.
std::optional<int> label_for(Source source, std::optional<int> rating);

/// Parses and segments one hostname or URL. Throws DomainError.
DomainRecord make_record(std::string_view raw, const Resources& res);

/// Feature description of a record. The log-likelihood and word families
/// are only computed when `needed` includes them.
features::DomainFeatures describe_record(const DomainRecord& r, const Resources& res, features::FeatureSets needed);

struct IngestResult {
  std::vector<DomainRecord> records;
  std::vector<std::string> diagnostics;  ///< one entry per skipped row, "line N: reason"
  std::size_t rows = 0;                  ///< data rows read (header excluded)
  std::size_t skipped = 0;
};

inline constexpr double kMaxSkipFraction = 0.10;

/// Reads "domain,source,rating,confidence". Rows that are malformed or have
/// no registrable domain are skipped with a diagnostic. Throws Error for a
/// bad header or when more than 10% of rows are skipped.
IngestResult ingest(std::istream& in, const Resources& res);
IngestResult ingest_file(const std::string& path, const Resources& res);

}  // namespace lexdom
