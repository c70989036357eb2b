#pragma once

// Unigram/bigram count corpora and the models derived from them: the
// first-order character Markov model used for the log-likelihood feature and
// the word/bigram probabilities used by the segmenter.

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "lexdom/psl.hpp"

namespace lexdom::corpus {

using CountMap = std::unordered_map<std::string, std::uint64_t, psl::StringHash, std::equal_to<>>;

inline constexpr std::size_t kDefaultUnigramLimit = 333'333;

class WordModel {
 public:
  WordModel() = default;
  explicit WordModel(CountMap counts);

  const CountMap& counts() const noexcept { return counts_; }
  std::uint64_t total() const noexcept { return total_; }
  std::size_t vocab_size() const noexcept { return counts_.size(); }
  bool empty() const noexcept { return counts_.empty(); }

  /// Zero for words not in the corpus.
  std::uint64_t count(std::string_view word) const noexcept;

 private:
  CountMap counts_;
  std::uint64_t total_ = 0;
};

/// Bigram counts keyed by "first second" (single space).
class BigramModel {
 public:
  BigramModel() = default;
  explicit BigramModel(CountMap counts) : counts_(std::move(counts)) {}

  const CountMap& counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return counts_.size(); }
  std::uint64_t count(std::string_view first, std::string_view second) const;

 private:
  CountMap counts_;
};

/// Reads "word<TAB>count" lines. Duplicate words sum. Only the first `limit`
/// records are kept (the files are frequency-sorted). Zero counts are dropped.
WordModel load_unigrams(std::istream& in, std::size_t limit = kDefaultUnigramLimit);
WordModel load_unigrams_file(const std::string& path, std::size_t limit = kDefaultUnigramLimit);

/// Reads "word1 word2<TAB>count" lines. Zero counts are dropped.
BigramModel load_bigrams(std::istream& in);
BigramModel load_bigrams_file(const std::string& path);

struct CharMarkovOptions {
  double smoothing = 1.0;         ///< add-alpha pseudo-count, must be > 0
  bool weight_by_count = true;    ///< weight each word's transitions by its corpus count
};

/// First-order Markov model over a-z. Row c of the transition table is the
/// distribution of the letter following c.
class CharMarkovModel {
 public:
  static constexpr std::size_t kAlphabet = 26;

  double first_char_logprob(char c) const { return first_[index(c)]; }
  double transition_logprob(char from, char to) const { return transition_[index(from)][index(to)]; }

  /// Log-likelihood of a string made only of a-z. Empty input scores 0.
  double loglik(std::string_view letters) const;

 private:
  friend CharMarkovModel build_char_markov(const WordModel&, const CharMarkovOptions&);
  static std::size_t index(char c);

  std::array<double, kAlphabet> first_{};
  std::array<std::array<double, kAlphabet>, kAlphabet> transition_{};
};

/// Throws Error on an empty model or non-positive smoothing.
CharMarkovModel build_char_markov(const WordModel& model, const CharMarkovOptions& options = {});

/// log P(word | prev) under the unigram/bigram models; `prev` empty means
/// sentence start. Requires a non-empty `wm`.
double word_logprob(std::string_view word, std::string_view prev, const WordModel& wm,
                    const BigramModel& bm);

/// Word probabilities for segmentation. Holds the unigram and bigram models
/// and evaluates the conditional log-probability of a token given its
/// predecessor.
class LanguageModel {
 public:
  LanguageModel(WordModel unigrams, BigramModel bigrams);

  const WordModel& unigrams() const noexcept { return unigrams_; }
  const BigramModel& bigrams() const noexcept { return bigrams_; }

  /// log P(word | prev). `prev` empty means sentence start. Uses the bigram
  /// ratio count(prev word)/count(prev) when both are known, otherwise the
  /// unigram probability count(word)/total, otherwise the unknown-word penalty.
  double word_logprob(std::string_view word, std::string_view prev = {}) const;

  /// log(10 / (total * 10^length)).
  double unknown_word_logprob(std::size_t length) const noexcept;

  struct Entry {
    std::uint64_t count = 0;      ///< unigram count, 0 if unknown
    std::uint32_t id = 0;         ///< word id for bigram_count; valid when a bigram flag is set
    bool starts_bigram = false;   ///< first word of at least one bigram
    bool ends_bigram = false;     ///< second word of at least one bigram
  };

  /// Single lookup for everything the segmenter needs about a token.
  /// Proper prefixes of known words are present with a zero count and no
  /// bigram flag; nullptr means no known word starts with `word`.
  const Entry* lookup(std::string_view word) const {
    const auto it = lexicon_.find(word);
    return it == lexicon_.end() ? nullptr : &it->second;
  }

  /// Bigram count by word ids; 0 if the pair was never seen.
  std::uint64_t bigram_count(std::uint32_t first, std::uint32_t second) const {
    const auto it = pair_counts_.find((static_cast<std::uint64_t>(first) << 32) | second);
    return it == pair_counts_.end() ? 0 : it->second;
  }

  double log_total() const noexcept { return log_total_; }

 private:
  WordModel unigrams_;
  BigramModel bigrams_;
  double log_total_;
  std::unordered_map<std::string, Entry, psl::StringHash, std::equal_to<>> lexicon_;
  std::unordered_map<std::uint64_t, std::uint64_t> pair_counts_;
};

}  // namespace lexdom::corpus
