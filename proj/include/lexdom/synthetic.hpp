#pragma once

// Seeded synthetic ratings data with a planted lexical signal.
//
// Each core is 1-3 common corpus words, optionally hyphen-joined and with a
// trailing number. A fixed list of "malicious" words is planted in a share
// of positive cores; digits, hyphens and some TLDs are mildly more frequent
// among positives, so the surface families carry weak signal on their own.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lexdom/corpus.hpp"
#include "lexdom/psl.hpp"

namespace lexdom::synthetic {

/// The 20 planted words. All are in the bundled unigram corpus.
const std::vector<std::string>& planted_words();

struct Options {
  std::size_t count = 10'000;
  double positive_rate = 0.25;
  double planted_rate = 0.7;      ///< share of positives carrying a planted word
  double digit_rate_pos = 0.25;   ///< chance of a trailing number
  double digit_rate_neg = 0.10;
  double hyphen_rate_pos = 0.20;  ///< chance that words are hyphen-joined
  double hyphen_rate_neg = 0.10;
  std::size_t pool_first_rank = 100;  ///< benign words come from this frequency-rank window
  std::size_t pool_last_rank = 3000;
  /// When set, domains that are not their own registrable domain are redrawn.
  const psl::SuffixRuleSet* suffixes = nullptr;
};

struct Row {
  std::string domain;
  int label = 0;
  int rating = 0;
  int confidence = 0;
};

/// Distinct domains, all cellular and rated. Throws Error if the corpus is
/// missing a planted word or is too small for the pool window.
std::vector<Row> generate(const corpus::WordModel& unigrams, std::uint64_t seed, const Options& options = {});

/// Ratings CSV with the standard header.
void write_csv(std::ostream& out, std::span<const Row> rows);

}  // namespace lexdom::synthetic
