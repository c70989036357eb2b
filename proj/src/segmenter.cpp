#include "lexdom/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "lexdom/error.hpp"

namespace lexdom::segmenter {
namespace {

// DP cell for "a token of length `len` ends at position `end`".
struct Cell {
  double score = -std::numeric_limits<double>::infinity();
  std::size_t tokens = 0;
  std::size_t prev_len = 0;  // length of the preceding token, 0 at sentence start
  bool reached = false;
};

class Table {
 public:
  Table(std::vector<Cell>& storage, std::size_t n, std::size_t max_len) : max_len_(max_len), cells_(storage) {
    cells_.assign((n + 1) * (max_len + 1), Cell{});
  }
  Cell& at(std::size_t end, std::size_t len) { return cells_[end * (max_len_ + 1) + len]; }
  const Cell& at(std::size_t end, std::size_t len) const { return cells_[end * (max_len_ + 1) + len]; }

 private:
  std::size_t max_len_;
  std::vector<Cell>& cells_;
};

// Per-substring quantities, indexed [start * (max_len + 1) + len].
struct Token {
  double unigram = 0.0;  // word_logprob(token) with no predecessor
  std::uint64_t count = 0;
  std::uint32_t id = 0;
  bool starts_bigram = false;
  bool ends_bigram = false;
};

// Reused across calls to avoid per-hostname allocation.
struct Scratch {
  std::vector<Cell> cells;
  std::vector<Token> tokens;
};

std::vector<std::string_view> backtrack(std::string_view s, const Table& t, std::size_t end, std::size_t len) {
  std::vector<std::string_view> out;
  while (len > 0) {
    out.push_back(s.substr(end - len, len));
    const std::size_t prev = t.at(end, len).prev_len;
    end -= len;
    len = prev;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// True if candidate (score, tokens, path) beats the incumbent under
// max score, then fewer tokens, then lexicographically smaller tokens.
template <typename PathA, typename PathB>
bool better(double score, std::size_t tokens, const Cell& incumbent, PathA&& candidate_path,
            PathB&& incumbent_path) {
  if (!incumbent.reached) return true;
  if (score != incumbent.score) return score > incumbent.score;
  if (tokens != incumbent.tokens) return tokens < incumbent.tokens;
  return candidate_path() < incumbent_path();
}

}  // namespace

Segmentation segment(std::string_view s, const corpus::LanguageModel& lm, std::size_t max_token_len) {
  if (s.empty()) throw Error("cannot segment an empty string");
  if (max_token_len == 0) throw Error("max_token_len must be positive");
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')))
      throw Error("segment input must be [a-z0-9]: '" + std::string(s) + "'");

  const std::size_t n = s.size();
  const std::size_t max_len = std::min(max_token_len, n);
  thread_local Scratch scratch;
  Table t(scratch.cells, n, max_len);

  // The bigram branch of word_logprob is evaluated below with the same
  // arithmetic, only for pairs where it can apply.
  const std::size_t stride = max_len + 1;
  auto& info = scratch.tokens;
  info.assign(n * stride, Token{});
  for (std::size_t start = 0; start < n; ++start) {
    for (std::size_t len = 1; len <= std::min(max_len, n - start); ++len) {
      Token& tok = info[start * stride + len];
      const auto* e = lm.lookup(s.substr(start, len));
      if (!e) {
        for (; len <= std::min(max_len, n - start); ++len) info[start * stride + len].unigram = lm.unknown_word_logprob(len);
        break;
      }
      tok.count = e->count;
      tok.id = e->id;
      tok.starts_bigram = e->starts_bigram;
      tok.ends_bigram = e->ends_bigram;
      tok.unigram = tok.count > 0 ? std::log(static_cast<double>(tok.count)) - lm.log_total()
                                  : lm.unknown_word_logprob(len);
    }
  }

  for (std::size_t end = 1; end <= n; ++end) {
    for (std::size_t len = 1; len <= std::min(max_len, end); ++len) {
      const std::size_t start = end - len;
      Cell& cell = t.at(end, len);
      const Token& tok = info[start * stride + len];
      if (start == 0) {
        cell = {tok.unigram, 1, 0, true};
        continue;
      }
      for (std::size_t prev_len = 1; prev_len <= std::min(max_len, start); ++prev_len) {
        const Cell& prev = t.at(start, prev_len);
        if (!prev.reached) continue;
        double lp = tok.unigram;
        const Token& before = info[(start - prev_len) * stride + prev_len];
        if (tok.ends_bigram && before.starts_bigram && before.count > 0) {
          if (const auto pair = lm.bigram_count(before.id, tok.id); pair > 0)
            lp = std::log(static_cast<double>(pair)) - std::log(static_cast<double>(before.count));
        }
        const double score = prev.score + lp;
        const std::size_t tokens = prev.tokens + 1;
        if (better(score, tokens, cell,
                   [&] { return backtrack(s, t, start, prev_len); },
                   [&] { return backtrack(s, t, start, cell.prev_len); })) {
          cell = {score, tokens, prev_len, true};
        }
      }
    }
  }

  std::size_t best_len = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const Cell& c = t.at(n, len);
    if (!c.reached) continue;
    if (best_len == 0 || better(c.score, c.tokens, t.at(n, best_len),
                                [&] { return backtrack(s, t, n, len); },
                                [&] { return backtrack(s, t, n, best_len); }))
      best_len = len;
  }

  Segmentation out;
  out.logprob = t.at(n, best_len).score;
  for (auto tok : backtrack(s, t, n, best_len)) out.tokens.emplace_back(tok);
  return out;
}

std::vector<std::string> segment_core(std::string_view core, const corpus::LanguageModel& lm,
                                      std::size_t max_token_len) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos <= core.size()) {
    const std::size_t hyphen = std::min(core.find('-', pos), core.size());
    const std::string_view piece = core.substr(pos, hyphen - pos);
    if (!piece.empty()) {
      auto seg = segment(piece, lm, max_token_len);
      std::move(seg.tokens.begin(), seg.tokens.end(), std::back_inserter(tokens));
    }
    pos = hyphen + 1;
  }
  return tokens;
}

double sequence_logprob(const std::vector<std::string>& tokens, const corpus::LanguageModel& lm) {
  double total = 0.0;
  std::string_view prev;
  for (const auto& tok : tokens) {
    total += lm.word_logprob(tok, prev);
    prev = tok;
  }
  return total;
}

}  // namespace lexdom::segmenter
