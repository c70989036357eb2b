#pragma once

// Lexical feature families for a domain core and the fitted mapping of those
// features onto columns of a sparse binary design matrix.
//
// Column layout is fixed: basic, characters, log-likelihood, TLD, words.
// Within a family, binned features come in bin order and vocabularies in
// sorted order.

#include <array>
#include <bitset>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexdom/corpus.hpp"

namespace lexdom::features {

enum class FeatureSet : std::uint8_t {
  kBasic = 1 << 0,
  kChars = 1 << 1,
  kLoglik = 1 << 2,
  kTld = 1 << 3,
  kWords = 1 << 4,
};

/// Bitmask of enabled feature families.
class FeatureSets {
 public:
  constexpr FeatureSets() = default;
  constexpr FeatureSets(std::initializer_list<FeatureSet> sets) {
    for (auto s : sets) bits_ |= static_cast<std::uint8_t>(s);
  }
  static constexpr FeatureSets all() {
    return {FeatureSet::kBasic, FeatureSet::kChars, FeatureSet::kLoglik, FeatureSet::kTld, FeatureSet::kWords};
  }

  constexpr bool has(FeatureSet s) const { return (bits_ & static_cast<std::uint8_t>(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }
  friend constexpr bool operator==(FeatureSets, FeatureSets) = default;
  friend constexpr FeatureSets operator|(FeatureSets a, FeatureSets b) {
    FeatureSets out;
    out.bits_ = static_cast<std::uint8_t>(a.bits_ | b.bits_);
    return out;
  }

  /// Comma-separated names in layout order, e.g. "basic,chars,tld".
  std::string to_string() const;
  /// Parses "basic,chars,tld,loglik,words" (any order, any subset). Throws Error.
  static FeatureSets parse(std::string_view csv);

 private:
  std::uint8_t bits_ = 0;
};

struct BasicCounts {
  int n_chars = 0;    ///< characters in the core (hyphens and digits included)
  int n_hyphens = 0;
  int n_digits = 0;
  int n_numbers = 0;  ///< maximal runs of consecutive digits

  friend bool operator==(const BasicCounts&, const BasicCounts&) = default;
};

BasicCounts basic_counts(std::string_view core);

inline constexpr std::size_t kCharColumns = 36;  // a-z then 0-9

/// Presence of each of a-z, 0-9. Bit i is letter 'a'+i for i < 26, digit i-26 otherwise.
std::bitset<kCharColumns> char_indicators(std::string_view core);

struct LogLikFeatures {
  std::optional<double> raw;         ///< log-likelihood of the letters; missing if there are none
  std::optional<double> normalized;  ///< raw / number of letters
};

/// Scores the core with digits and hyphens removed.
LogLikFeatures char_loglik(std::string_view core, const corpus::CharMarkovModel& model);

/// Everything `vectorize` needs for one domain. Families not computed are
/// left unset, and vectorizing against a space that needs them is an error.
struct DomainFeatures {
  std::string core;
  std::string tld;
  BasicCounts basic;
  std::bitset<kCharColumns> chars;
  std::optional<LogLikFeatures> loglik;
  std::optional<std::vector<std::string>> tokens;
};

/// Computes all families that the inputs allow: log-likelihood only with a
/// model, words only with tokens.
DomainFeatures describe(std::string core, std::string tld, const corpus::CharMarkovModel* markov,
                        std::optional<std::vector<std::string>> tokens);

struct SparseVector {
  std::vector<std::uint32_t> indices;  ///< strictly increasing; every value is 1
};

/// Quantile bins: value v falls in bin k = number of edges strictly below v.
struct Bins {
  std::vector<double> edges;  ///< strictly increasing interior cut points

  std::size_t count() const noexcept { return edges.size() + 1; }
  std::size_t bin_of(double v) const noexcept;

  /// Decile cut points: for k = 1..9 the smallest training value v with at
  /// least k/10 of the mass <= v. Duplicates are merged and cuts equal to the
  /// training maximum dropped, so every bin holds training mass.
  static Bins deciles(std::vector<double> values);
};

inline constexpr std::array<const char*, 4> kCountBinLabels = {"0", "1", "2", ">=3"};

class FeatureSpace {
 public:
  static constexpr int kFormatVersion = 1;

  FeatureSets enabled() const noexcept { return enabled_; }
  std::size_t column_count() const noexcept { return names_.size(); }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  const Bins& char_bins() const noexcept { return char_bins_; }
  const Bins& loglik_bins() const noexcept { return ll_bins_; }
  const Bins& loglik_norm_bins() const noexcept { return ll_norm_bins_; }
  const std::map<std::string, std::uint32_t>& tld_vocab() const noexcept { return tld_vocab_; }
  const std::map<std::string, std::uint32_t>& word_vocab() const noexcept { return word_vocab_; }

  /// Family-qualified human-readable name of a column, e.g. word:"payday".
  const std::string& column_name(std::uint32_t column) const { return names_.at(column); }

  /// Number of indicator columns set for every record by binned families
  /// (basic: 4, log-likelihood: 2).
  std::size_t binned_feature_count() const noexcept;

  std::string to_json() const;
  /// Throws FormatError on malformed documents, version mismatch, or a
  /// fingerprint that does not match the content.
  static FeatureSpace from_json(std::string_view text);

 private:
  friend FeatureSpace fit_feature_space(std::span<const DomainFeatures>, FeatureSets, std::size_t);
  friend SparseVector vectorize(const DomainFeatures&, const FeatureSpace&);

  void layout();
  std::string content_json() const;

  FeatureSets enabled_;
  Bins char_bins_;
  Bins ll_bins_;
  Bins ll_norm_bins_;
  std::map<std::string, std::uint32_t> tld_vocab_;
  std::map<std::string, std::uint32_t> word_vocab_;

  // Derived by layout().
  std::uint32_t basic_offset_ = 0;
  std::uint32_t chars_offset_ = 0;
  std::uint32_t loglik_offset_ = 0;
  std::uint32_t tld_offset_ = 0;
  std::uint32_t words_offset_ = 0;
  std::vector<std::string> names_;
  std::string fingerprint_;
};

/// Fits bins and vocabularies on training data. Throws Error on empty input
/// or an empty feature-set selection.
FeatureSpace fit_feature_space(std::span<const DomainFeatures> training, FeatureSets enabled,
                               std::size_t min_word_count = 1);

/// Throws Error when the space needs a family the record was not described with.
SparseVector vectorize(const DomainFeatures& record, const FeatureSpace& space);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace lexdom::features
