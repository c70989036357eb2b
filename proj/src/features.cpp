#include "lexdom/features.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "lexdom/error.hpp"

namespace lexdom::features {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<FeatureSet, std::string_view>, 5> kSetNames = {{
    {FeatureSet::kBasic, "basic"},
    {FeatureSet::kChars, "chars"},
    {FeatureSet::kLoglik, "loglik"},
    {FeatureSet::kTld, "tld"},
    {FeatureSet::kWords, "words"},
}};

std::size_t count_bin(int v) { return static_cast<std::size_t>(std::min(v, 3)); }

std::string fmt_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// "<name><=a", "<name> in (a,b]", "<name>>b" for each bin of `bins`.
void append_bin_names(std::vector<std::string>& out, const std::string& prefix, const Bins& bins) {
  const auto& e = bins.edges;
  if (e.empty()) {
    out.push_back(prefix + ":all");
    return;
  }
  out.push_back(prefix + "<=" + fmt_number(e.front()));
  for (std::size_t k = 1; k < e.size(); ++k)
    out.push_back(prefix + " in (" + fmt_number(e[k - 1]) + "," + fmt_number(e[k]) + "]");
  out.push_back(prefix + ">" + fmt_number(e.back()));
}

void append_count_names(std::vector<std::string>& out, const std::string& prefix) {
  for (std::size_t k = 0; k < kCountBinLabels.size(); ++k)
    out.push_back(prefix + (k == 3 ? std::string(">=3") : "=" + std::string(kCountBinLabels[k])));
}

std::vector<double> to_doubles(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw FormatError(std::string("missing array '") + key + "'");
  return j.at(key).get<std::vector<double>>();
}

std::vector<std::string> to_strings(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw FormatError(std::string("missing array '") + key + "'");
  return j.at(key).get<std::vector<std::string>>();
}

}  // namespace

std::string FeatureSets::to_string() const {
  std::string out;
  for (const auto& [set, name] : kSetNames) {
    if (!has(set)) continue;
    if (!out.empty()) out.push_back(',');
    out.append(name);
  }
  return out;
}

FeatureSets FeatureSets::parse(std::string_view csv) {
  FeatureSets out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    std::string_view item = csv.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    pos = comma + 1;
    if (item.empty()) continue;
    const auto it = std::find_if(kSetNames.begin(), kSetNames.end(), [&](const auto& p) { return p.second == item; });
    if (it == kSetNames.end()) throw Error("unknown feature set '" + std::string(item) + "'");
    out.bits_ |= static_cast<std::uint8_t>(it->first);
  }
  if (out.empty()) throw Error("no feature sets selected");
  return out;
}

BasicCounts basic_counts(std::string_view core) {
  BasicCounts c;
  bool in_number = false;
  for (char ch : core) {
    if (ch == '.') continue;
    ++c.n_chars;
    const bool digit = ch >= '0' && ch <= '9';
    if (ch == '-') ++c.n_hyphens;
    if (digit) {
      ++c.n_digits;
      if (!in_number) ++c.n_numbers;
    }
    in_number = digit;
  }
  return c;
}

std::bitset<kCharColumns> char_indicators(std::string_view core) {
  std::bitset<kCharColumns> out;
  for (char ch : core) {
    if (ch >= 'a' && ch <= 'z') out.set(static_cast<std::size_t>(ch - 'a'));
    else if (ch >= '0' && ch <= '9') out.set(26 + static_cast<std::size_t>(ch - '0'));
  }
  return out;
}

LogLikFeatures char_loglik(std::string_view core, const corpus::CharMarkovModel& model) {
  std::string letters;
  letters.reserve(core.size());
  for (char ch : core)
    if (ch >= 'a' && ch <= 'z') letters.push_back(ch);
  if (letters.empty()) return {};
  const double raw = model.loglik(letters);
  return {raw, raw / static_cast<double>(letters.size())};
}

DomainFeatures describe(std::string core, std::string tld, const corpus::CharMarkovModel* markov,
                        std::optional<std::vector<std::string>> tokens) {
  DomainFeatures f;
  f.basic = basic_counts(core);
  f.chars = char_indicators(core);
  if (markov) f.loglik = char_loglik(core, *markov);
  f.tokens = std::move(tokens);
  f.core = std::move(core);
  f.tld = std::move(tld);
  return f;
}

std::size_t Bins::bin_of(double v) const noexcept {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), v) - edges.begin());
}

Bins Bins::deciles(std::vector<double> values) {
  Bins out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const double top = values.back();
  for (std::size_t k = 1; k <= 9; ++k) {
    const std::size_t rank = (k * m + 9) / 10;  // ceil(k*m/10) >= 1
    const double edge = values[rank - 1];
    if (edge >= top) break;
    if (out.edges.empty() || edge > out.edges.back()) out.edges.push_back(edge);
  }
  return out;
}

std::size_t FeatureSpace::binned_feature_count() const noexcept {
  return (enabled_.has(FeatureSet::kBasic) ? 4 : 0) + (enabled_.has(FeatureSet::kLoglik) ? 2 : 0);
}

void FeatureSpace::layout() {
  names_.clear();
  if (enabled_.has(FeatureSet::kBasic)) {
    basic_offset_ = static_cast<std::uint32_t>(names_.size());
    append_bin_names(names_, "basic:n_chars", char_bins_);
    append_count_names(names_, "basic:n_hyphens");
    append_count_names(names_, "basic:n_digits");
    append_count_names(names_, "basic:n_numbers");
  }
  if (enabled_.has(FeatureSet::kChars)) {
    chars_offset_ = static_cast<std::uint32_t>(names_.size());
    for (char c = 'a'; c <= 'z'; ++c) names_.push_back(std::string("char:") + c);
    for (char c = '0'; c <= '9'; ++c) names_.push_back(std::string("char:") + c);
  }
  if (enabled_.has(FeatureSet::kLoglik)) {
    loglik_offset_ = static_cast<std::uint32_t>(names_.size());
    append_bin_names(names_, "loglik:raw", ll_bins_);
    names_.push_back("loglik:raw=missing");
    append_bin_names(names_, "loglik:norm", ll_norm_bins_);
    names_.push_back("loglik:norm=missing");
  }
  if (enabled_.has(FeatureSet::kTld)) {
    tld_offset_ = static_cast<std::uint32_t>(names_.size());
    for (auto& [tld, col] : tld_vocab_) {
      col = static_cast<std::uint32_t>(names_.size());
      names_.push_back("tld:\"." + tld + "\"");
    }
  }
  if (enabled_.has(FeatureSet::kWords)) {
    words_offset_ = static_cast<std::uint32_t>(names_.size());
    for (auto& [word, col] : word_vocab_) {
      col = static_cast<std::uint32_t>(names_.size());
      names_.push_back("word:\"" + word + "\"");
    }
  }
  fingerprint_ = fnv1a_hex(content_json());
}

std::string FeatureSpace::content_json() const {
  json j;
  j["version"] = kFormatVersion;
  j["enabled"] = enabled_.to_string();
  j["char_bin_edges"] = char_bins_.edges;
  j["loglik_bin_edges"] = ll_bins_.edges;
  j["loglik_norm_bin_edges"] = ll_norm_bins_.edges;
  json tlds = json::array();
  for (const auto& [tld, col] : tld_vocab_) tlds.push_back(tld);
  json words = json::array();
  for (const auto& [word, col] : word_vocab_) words.push_back(word);
  j["tlds"] = std::move(tlds);
  j["words"] = std::move(words);
  return j.dump();
}

std::string FeatureSpace::to_json() const {
  json j = json::parse(content_json());
  j["column_count"] = column_count();
  j["fingerprint"] = fingerprint_;
  return j.dump(1);
}

FeatureSpace FeatureSpace::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("feature space is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("version")) throw FormatError("feature space has no version");
    if (j.at("version").get<int>() != kFormatVersion)
      throw FormatError("feature space version " + j.at("version").dump() + " is not supported");
    FeatureSpace fs;
    fs.enabled_ = FeatureSets::parse(j.at("enabled").get<std::string>());
    fs.char_bins_.edges = to_doubles(j, "char_bin_edges");
    fs.ll_bins_.edges = to_doubles(j, "loglik_bin_edges");
    fs.ll_norm_bins_.edges = to_doubles(j, "loglik_norm_bin_edges");
    for (const auto& t : to_strings(j, "tlds")) fs.tld_vocab_.emplace(t, 0);
    for (const auto& w : to_strings(j, "words")) fs.word_vocab_.emplace(w, 0);
    for (const Bins* b : {&fs.char_bins_, &fs.ll_bins_, &fs.ll_norm_bins_})
      if (!std::is_sorted(b->edges.begin(), b->edges.end()) ||
          std::adjacent_find(b->edges.begin(), b->edges.end()) != b->edges.end())
        throw FormatError("bin edges are not strictly increasing");
    fs.layout();
    if (j.value("fingerprint", std::string{}) != fs.fingerprint_)
      throw FormatError("feature space fingerprint does not match its content");
    return fs;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed feature space: ") + e.what());
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("malformed feature space: ") + e.what());
  }
}

FeatureSpace fit_feature_space(std::span<const DomainFeatures> training, FeatureSets enabled,
                               std::size_t min_word_count) {
  if (training.empty()) throw Error("cannot fit a feature space on an empty training set");
  if (enabled.empty()) throw Error("no feature sets enabled");

  FeatureSpace fs;
  fs.enabled_ = enabled;

  if (enabled.has(FeatureSet::kBasic)) {
    std::vector<double> lengths;
    lengths.reserve(training.size());
    for (const auto& r : training) lengths.push_back(r.basic.n_chars);
    fs.char_bins_ = Bins::deciles(std::move(lengths));
  }
  if (enabled.has(FeatureSet::kLoglik)) {
    std::vector<double> raw, norm;
    for (const auto& r : training) {
      if (!r.loglik) throw Error("feature space needs log-likelihood but '" + r.core + "' has none");
      if (r.loglik->raw) raw.push_back(*r.loglik->raw);
      if (r.loglik->normalized) norm.push_back(*r.loglik->normalized);
    }
    fs.ll_bins_ = Bins::deciles(std::move(raw));
    fs.ll_norm_bins_ = Bins::deciles(std::move(norm));
  }
  if (enabled.has(FeatureSet::kTld)) {
    for (const auto& r : training) fs.tld_vocab_.emplace(r.tld, 0);
  }
  if (enabled.has(FeatureSet::kWords)) {
    // Document frequency: a word counts once per domain.
    std::unordered_map<std::string, std::size_t> df;
    std::set<std::string_view> seen;
    for (const auto& r : training) {
      if (!r.tokens) throw Error("feature space needs words but '" + r.core + "' was not segmented");
      seen.clear();
      for (const auto& t : *r.tokens)
        if (seen.insert(t).second) ++df[t];
    }
    for (const auto& [word, n] : df)
      if (n >= min_word_count) fs.word_vocab_.emplace(word, 0);
  }
  fs.layout();
  return fs;
}

SparseVector vectorize(const DomainFeatures& r, const FeatureSpace& fs) {
  SparseVector v;
  auto& idx = v.indices;
  const FeatureSets en = fs.enabled_;

  if (en.has(FeatureSet::kBasic)) {
    std::uint32_t off = fs.basic_offset_;
    idx.push_back(off + static_cast<std::uint32_t>(fs.char_bins_.bin_of(r.basic.n_chars)));
    off += static_cast<std::uint32_t>(fs.char_bins_.count());
    idx.push_back(off + static_cast<std::uint32_t>(count_bin(r.basic.n_hyphens)));
    idx.push_back(off + 4 + static_cast<std::uint32_t>(count_bin(r.basic.n_digits)));
    idx.push_back(off + 8 + static_cast<std::uint32_t>(count_bin(r.basic.n_numbers)));
  }
  if (en.has(FeatureSet::kChars)) {
    for (std::size_t c = 0; c < kCharColumns; ++c)
      if (r.chars.test(c)) idx.push_back(fs.chars_offset_ + static_cast<std::uint32_t>(c));
  }
  if (en.has(FeatureSet::kLoglik)) {
    if (!r.loglik) throw Error("feature space needs log-likelihood but '" + r.core + "' has none");
    const std::uint32_t raw_off = fs.loglik_offset_;
    const std::uint32_t raw_missing = raw_off + static_cast<std::uint32_t>(fs.ll_bins_.count());
    const std::uint32_t norm_off = raw_missing + 1;
    const std::uint32_t norm_missing = norm_off + static_cast<std::uint32_t>(fs.ll_norm_bins_.count());
    idx.push_back(r.loglik->raw ? raw_off + static_cast<std::uint32_t>(fs.ll_bins_.bin_of(*r.loglik->raw))
                                : raw_missing);
    idx.push_back(r.loglik->normalized
                      ? norm_off + static_cast<std::uint32_t>(fs.ll_norm_bins_.bin_of(*r.loglik->normalized))
                      : norm_missing);
  }
  if (en.has(FeatureSet::kTld)) {
    if (const auto it = fs.tld_vocab_.find(r.tld); it != fs.tld_vocab_.end()) idx.push_back(it->second);
  }
  if (en.has(FeatureSet::kWords)) {
    if (!r.tokens) throw Error("feature space needs words but '" + r.core + "' was not segmented");
    const std::size_t first_word = idx.size();
    for (const auto& t : *r.tokens)
      if (const auto it = fs.word_vocab_.find(t); it != fs.word_vocab_.end()) idx.push_back(it->second);
    std::sort(idx.begin() + static_cast<std::ptrdiff_t>(first_word), idx.end());
    idx.erase(std::unique(idx.begin() + static_cast<std::ptrdiff_t>(first_word), idx.end()), idx.end());
  }
  return v;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lexdom::features
