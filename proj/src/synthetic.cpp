#include "lexdom/synthetic.hpp"

#include <algorithm>
#include <unordered_set>

#include "lexdom/error.hpp"
#include "lexdom/rng.hpp"

namespace lexdom::synthetic {
namespace {

bool plain_word(std::string_view w) {
  if (w.size() < 3 || w.size() > 8) return false;
  return std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

std::vector<std::string> benign_pool(const corpus::WordModel& unigrams, const Options& opt) {
  std::vector<std::pair<std::uint64_t, std::string_view>> ranked;
  ranked.reserve(unigrams.vocab_size());
  for (const auto& [w, c] : unigrams.counts()) ranked.emplace_back(c, w);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (ranked.size() < opt.pool_last_rank) throw Error("unigram corpus too small for the synthetic word pool");

  const auto& planted = planted_words();
  std::vector<std::string> pool;
  for (std::size_t r = opt.pool_first_rank; r < opt.pool_last_rank; ++r) {
    const auto w = ranked[r].second;
    if (!plain_word(w)) continue;
    if (std::find(planted.begin(), planted.end(), w) != planted.end()) continue;
    pool.emplace_back(w);
  }
  if (pool.empty()) throw Error("synthetic word pool is empty");
  return pool;
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

struct TldMix {
  std::vector<std::string> tlds;
  std::vector<double> cumulative;

  const std::string& draw(Rng& rng) const {
    const double u = rng.uniform();
    for (std::size_t i = 0; i < cumulative.size(); ++i)
      if (u < cumulative[i]) return tlds[i];
    return tlds.back();
  }
};

TldMix make_mix(std::vector<std::string> tlds, std::vector<double> weights) {
  TldMix m{std::move(tlds), {}};
  double acc = 0.0, total = 0.0;
  for (double w : weights) total += w;
  for (double w : weights) m.cumulative.push_back(acc += w / total);
  return m;
}

}  // namespace

const std::vector<std::string>& planted_words() {
  static const std::vector<std::string> words = {
      "casino",  "poker",  "loan",    "payday", "pharmacy", "pills",    "gambling", "crypto", "bonus",  "lottery",
      "prize",   "winner", "replica", "cheap",  "discount", "viagra",   "dating",   "jackpot", "forex", "credit"};
  return words;
}

std::vector<Row> generate(const corpus::WordModel& unigrams, std::uint64_t seed, const Options& opt) {
  for (const auto& w : planted_words())
    if (unigrams.count(w) == 0) throw Error("planted word missing from corpus: " + w);
  const auto pool = benign_pool(unigrams, opt);
  const auto& planted = planted_words();

  const auto neg_tlds = make_mix({"com", "net", "org", "info", "biz", "co.uk", "de"}, {60, 10, 12, 4, 2, 7, 5});
  const auto pos_tlds = make_mix({"com", "net", "org", "info", "biz", "co.uk", "de"}, {55, 13, 8, 9, 6, 5, 4});

  Rng rng(seed);
  std::unordered_set<std::string> seen;
  std::vector<Row> rows;
  rows.reserve(opt.count);
  while (rows.size() < opt.count) {
    Row row;
    row.label = rng.bernoulli(opt.positive_rate) ? 1 : 0;
    const bool pos = row.label == 1;

    const std::size_t n_words = 1 + static_cast<std::size_t>(rng.below(3));
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n_words; ++i) words.push_back(pick(rng, pool));
    if (pos && rng.bernoulli(opt.planted_rate)) words[rng.below(n_words)] = pick(rng, planted);

    const bool hyphens = rng.bernoulli(pos ? opt.hyphen_rate_pos : opt.hyphen_rate_neg);
    std::string core;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0 && hyphens) core += '-';
      core += words[i];
    }
    if (rng.bernoulli(pos ? opt.digit_rate_pos : opt.digit_rate_neg)) {
      if (hyphens) core += '-';
      core += std::to_string(rng.below(1000));
    }
    row.domain = core + "." + (pos ? pos_tlds : neg_tlds).draw(rng);
    if (opt.suffixes && opt.suffixes->registrable_domain(row.domain) != row.domain) continue;
    if (!seen.insert(row.domain).second) continue;

    row.rating = pos ? static_cast<int>(rng.below(60)) : 60 + static_cast<int>(rng.below(41));
    row.confidence = static_cast<int>(rng.below(101));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& out, std::span<const Row> rows) {
  out << "domain,source,rating,confidence\n";
  for (const auto& r : rows) out << r.domain << ",cellular," << r.rating << ',' << r.confidence << '\n';
}

}  // namespace lexdom::synthetic
