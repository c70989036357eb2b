#pragma once

// Public suffix list parsing and effective second-level domain extraction.
//
// Rules are stored as lowercase dot-joined label sequences. Wildcard rules keep
// their leading "*" label ("*.ck"); exception rules are stored without the "!"
// prefix ("www.ck"). Labels are opaque byte strings, so IDN rules in UTF-8 and
// punycoded rules both match literally.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace lexdom::psl {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

using RuleSet = std::unordered_set<std::string, StringHash, std::equal_to<>>;

struct ParseOptions {
  /// Include rules from the "===BEGIN PRIVATE DOMAINS===" section.
  bool include_private = true;
};

class SuffixRuleSet {
 public:
  SuffixRuleSet() = default;

  const RuleSet& exact_rules() const noexcept { return exact_; }
  const RuleSet& wildcard_rules() const noexcept { return wildcard_; }
  const RuleSet& exception_rules() const noexcept { return exception_; }
  const std::string& source_version() const noexcept { return source_version_; }

  std::size_t size() const noexcept { return exact_.size() + wildcard_.size() + exception_.size(); }
  bool empty() const noexcept { return size() == 0; }

  /// Public suffix of a lowercase hostname under the standard PSL algorithm:
  /// exception rules beat everything, otherwise the rule with most labels
  /// wins, and an unmatched name falls back to its last label.
  /// Returns nullopt for syntactically invalid hostnames (empty labels).
  std::optional<std::string_view> public_suffix(std::string_view host) const;

  /// Public suffix plus one label, or nullopt when the hostname is itself a
  /// suffix, empty, starts with a dot, or has empty labels. Mixed-case input
  /// is lowercased (ASCII only).
  std::optional<std::string> registrable_domain(std::string_view host) const;

 private:
  friend SuffixRuleSet parse_psl(std::string_view text, const ParseOptions& options);

  RuleSet exact_;
  RuleSet wildcard_;
  RuleSet exception_;
  std::string source_version_;
};

/// Parses `effective_tld_names.dat` content. Throws ParseError naming the
/// offending line for rules with embedded whitespace or empty labels.
SuffixRuleSet parse_psl(std::string_view text, const ParseOptions& options = {});

SuffixRuleSet load_psl_file(const std::string& path, const ParseOptions& options = {});

/// Punycodes each non-ASCII label of a UTF-8 name ("xn--" prefix); ASCII
/// labels pass through. Throws DomainError on invalid UTF-8.
std::string to_ace(std::string_view name);

struct DomainName {
  std::string core;  ///< label immediately left of the public suffix
  std::string tld;   ///< the matched public suffix, possibly multi-label
  std::string e2ld() const { return core + "." + tld; }

  friend bool operator==(const DomainName&, const DomainName&) = default;
};

/// Host component of a URL or bare hostname: strips scheme, userinfo, port,
/// path, query, fragment and a trailing root dot, then lowercases.
/// Throws DomainError if no host can be derived.
std::string extract_hostname(std::string_view url_or_host);

/// Reduces a lowercase hostname to its effective second-level domain.
/// Throws DomainError when the hostname is a public suffix, has empty labels,
/// or when the core holds characters other than [a-z0-9-].
DomainName effective_2ld(std::string_view hostname, const SuffixRuleSet& rules);

}  // namespace lexdom::psl
