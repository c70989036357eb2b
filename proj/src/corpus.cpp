#include "lexdom/corpus.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

#include "lexdom/error.hpp"

namespace lexdom::corpus {
namespace {

std::string_view strip_cr(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

struct CountLine {
  std::string_view key;
  std::uint64_t count;
};

CountLine split_count_line(std::string_view line, std::size_t line_no) {
  const auto tab = line.rfind('\t');
  if (tab == std::string_view::npos) throw ParseError(line_no, "expected '<token><TAB><count>'");
  const std::string_view key = line.substr(0, tab);
  const std::string_view num = line.substr(tab + 1);
  if (key.empty()) throw ParseError(line_no, "empty token");
  std::uint64_t count = 0;
  const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), count);
  if (num.empty() || ec != std::errc{} || ptr != num.data() + num.size())
    throw ParseError(line_no, "count is not a non-negative integer: '" + std::string(num) + "'");
  return {key, count};
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file: " + path);
  return in;
}

double logprob_impl(std::string_view word, std::string_view prev, const WordModel& wm,
                    const BigramModel& bm, double log_total) {
  if (!prev.empty()) {
    if (const auto pair = bm.count(prev, word); pair > 0) {
      if (const auto prev_count = wm.count(prev); prev_count > 0)
        return std::log(static_cast<double>(pair)) - std::log(static_cast<double>(prev_count));
    }
  }
  if (const auto c = wm.count(word); c > 0) return std::log(static_cast<double>(c)) - log_total;
  return std::numbers::ln10 - log_total - static_cast<double>(word.size()) * std::numbers::ln10;
}

}  // namespace

WordModel::WordModel(CountMap counts) : counts_(std::move(counts)) {
  for (const auto& [word, c] : counts_) total_ += c;
}

std::uint64_t WordModel::count(std::string_view word) const noexcept {
  const auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t BigramModel::count(std::string_view first, std::string_view second) const {
  std::string key;
  key.reserve(first.size() + second.size() + 1);
  key.append(first).push_back(' ');
  key.append(second);
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

WordModel load_unigrams(std::istream& in, std::size_t limit) {
  CountMap counts;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (records < limit && std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto [word, c] = split_count_line(line, line_no);
    ++records;
    if (c > 0) counts[std::string(word)] += c;
  }
  return WordModel(std::move(counts));
}

WordModel load_unigrams_file(const std::string& path, std::size_t limit) {
  auto in = open_or_throw(path);
  return load_unigrams(in, limit);
}

BigramModel load_bigrams(std::istream& in) {
  CountMap counts;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = strip_cr(raw);
    if (line.empty()) continue;
    const auto [pair, c] = split_count_line(line, line_no);
    const auto space = pair.find(' ');
    if (space == std::string_view::npos || space == 0 || space + 1 == pair.size() ||
        pair.find(' ', space + 1) != std::string_view::npos)
      throw ParseError(line_no, "expected two tokens separated by one space");
    if (c > 0) counts[std::string(pair)] += c;
  }
  return BigramModel(std::move(counts));
}

BigramModel load_bigrams_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_bigrams(in);
}

std::size_t CharMarkovModel::index(char c) {
  if (c < 'a' || c > 'z') throw Error(std::string("character outside a-z: '") + c + "'");
  return static_cast<std::size_t>(c - 'a');
}

double CharMarkovModel::loglik(std::string_view letters) const {
  if (letters.empty()) return 0.0;
  double ll = first_char_logprob(letters.front());
  for (std::size_t i = 1; i < letters.size(); ++i) ll += transition_logprob(letters[i - 1], letters[i]);
  return ll;
}

CharMarkovModel build_char_markov(const WordModel& model, const CharMarkovOptions& options) {
  if (model.empty()) throw Error("cannot build a character model from an empty corpus");
  if (!(options.smoothing > 0.0)) throw Error("character model smoothing must be > 0");

  constexpr std::size_t k = CharMarkovModel::kAlphabet;
  std::array<double, k> first{};
  std::array<std::array<double, k>, k> trans{};

  std::string letters;
  for (const auto& [word, c] : model.counts()) {
    letters.clear();
    for (char ch : word) {
      if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
      if (ch >= 'a' && ch <= 'z') letters.push_back(ch);
    }
    if (letters.empty()) continue;
    const double weight = options.weight_by_count ? static_cast<double>(c) : 1.0;
    first[static_cast<std::size_t>(letters[0] - 'a')] += weight;
    for (std::size_t i = 1; i < letters.size(); ++i)
      trans[static_cast<std::size_t>(letters[i - 1] - 'a')][static_cast<std::size_t>(letters[i] - 'a')] += weight;
  }

  const double alpha = options.smoothing;
  auto normalize = [alpha](const std::array<double, k>& row, std::array<double, k>& out) {
    double sum = 0.0;
    for (double v : row) sum += v + alpha;
    const double log_sum = std::log(sum);
    for (std::size_t j = 0; j < k; ++j) out[j] = std::log(row[j] + alpha) - log_sum;
  };

  CharMarkovModel m;
  normalize(first, m.first_);
  for (std::size_t i = 0; i < k; ++i) normalize(trans[i], m.transition_[i]);
  return m;
}

double word_logprob(std::string_view word, std::string_view prev, const WordModel& wm,
                    const BigramModel& bm) {
  if (wm.total() == 0) throw Error("word model is empty");
  return logprob_impl(word, prev, wm, bm, std::log(static_cast<double>(wm.total())));
}

LanguageModel::LanguageModel(WordModel unigrams, BigramModel bigrams)
    : unigrams_(std::move(unigrams)), bigrams_(std::move(bigrams)) {
  if (unigrams_.total() == 0) throw Error("word model is empty");
  log_total_ = std::log(static_cast<double>(unigrams_.total()));
  lexicon_.reserve(unigrams_.vocab_size());
  for (const auto& [word, c] : unigrams_.counts()) lexicon_[word].count = c;
  std::uint32_t next_id = 0;
  auto with_id = [&](std::string_view w) -> Entry& {
    auto& e = lexicon_[std::string(w)];
    if (!e.starts_bigram && !e.ends_bigram) e.id = next_id++;
    return e;
  };
  pair_counts_.reserve(bigrams_.size());
  for (const auto& [key, c] : bigrams_.counts()) {
    const auto space = key.find(' ');
    if (c == 0 || space == std::string::npos) continue;
    auto& first = with_id(std::string_view(key).substr(0, space));
    first.starts_bigram = true;
    auto& second = with_id(std::string_view(key).substr(space + 1));
    second.ends_bigram = true;
    pair_counts_[(static_cast<std::uint64_t>(first.id) << 32) | second.id] = c;
  }
  std::vector<std::string> words;
  words.reserve(lexicon_.size());
  for (const auto& [word, e] : lexicon_) words.push_back(word);
  for (const auto& w : words)
    for (std::size_t len = w.size() - 1; len > 0; --len)
      if (!lexicon_.try_emplace(w.substr(0, len)).second) break;
}

double LanguageModel::word_logprob(std::string_view word, std::string_view prev) const {
  return logprob_impl(word, prev, unigrams_, bigrams_, log_total_);
}

double LanguageModel::unknown_word_logprob(std::size_t length) const noexcept {
  return std::numbers::ln10 - log_total_ - static_cast<double>(length) * std::numbers::ln10;
}

}  // namespace lexdom::corpus
