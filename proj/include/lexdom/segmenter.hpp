#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lexdom/corpus.hpp"

namespace lexdom::segmenter {

inline constexpr std::size_t kDefaultMaxTokenLen = 20;

struct Segmentation {
  std::vector<std::string> tokens;
  double logprob = 0.0;  ///< sum of log P(token | previous token), left to right
};

/// Most likely split of `s` into tokens of length <= max_token_len under the
/// bigram language model. Each token is conditioned on its predecessor, the
/// first on sentence start. Exact over all segmentations; ties go to fewer
/// tokens, then to the lexicographically smallest token sequence.
///
/// `s` must be non-empty and made of [a-z0-9]; otherwise throws Error.
Segmentation segment(std::string_view s, const corpus::LanguageModel& lm,
                     std::size_t max_token_len = kDefaultMaxTokenLen);

/// Splits a domain core on hyphens, drops empty pieces and segments each
/// piece independently. A core of only hyphens yields no tokens.
std::vector<std::string> segment_core(std::string_view core, const corpus::LanguageModel& lm,
                                      std::size_t max_token_len = kDefaultMaxTokenLen);

/// Sum of per-token conditional log-probabilities, accumulated left to right.
double sequence_logprob(const std::vector<std::string>& tokens, const corpus::LanguageModel& lm);

}  // namespace lexdom::segmenter
