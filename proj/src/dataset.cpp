#include "lexdom/dataset.hpp"

#include <charconv>
#include <fstream>

#include "lexdom/error.hpp"

namespace lexdom {
namespace {

constexpr std::string_view kHeader = "domain,source,rating,confidence";

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::optional<int> parse_score(std::string_view field, const char* what) {
  if (field.empty()) return std::nullopt;
  int v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw Error(std::string(what) + " is not an integer: '" + std::string(field) + "'");
  if (v < 0 || v > 100) throw Error(std::string(what) + " outside 0..100: " + std::to_string(v));
  return v;
}

}  // namespace

Resources Resources::load(const ResourcePaths& paths) {
  auto suffixes = psl::load_psl_file(paths.psl, {.include_private = paths.include_private_suffixes});
  auto unigrams = corpus::load_unigrams_file(paths.unigrams, paths.unigram_limit);
  auto markov = corpus::build_char_markov(unigrams, paths.markov);
  auto bigrams = corpus::load_bigrams_file(paths.bigrams);
  return Resources{std::move(suffixes), corpus::LanguageModel(std::move(unigrams), std::move(bigrams)), markov};
}

std::string_view to_string(Source s) { return s == Source::kCellular ? "cellular" : "directory"; }

std::optional<int> label_for(Source source, std::optional<int> rating) {
  if (source == Source::kDirectory) return 0;
  if (!rating) return std::nullopt;
  return *rating < kMaliciousBelow ? 1 : 0;
}

DomainRecord make_record(std::string_view raw, const Resources& res) {
  DomainRecord r;
  r.raw = std::string(raw);
  r.parsed = psl::effective_2ld(psl::extract_hostname(raw), res.suffixes);
  r.tokens = segmenter::segment_core(r.parsed.core, res.language, res.max_token_len);
  return r;
}

features::DomainFeatures describe_record(const DomainRecord& r, const Resources& res, features::FeatureSets needed) {
  using features::FeatureSet;
  return features::describe(r.parsed.core, r.parsed.tld, needed.has(FeatureSet::kLoglik) ? &res.markov : nullptr,
                            needed.has(FeatureSet::kWords) ? std::optional(r.tokens) : std::nullopt);
}

IngestResult ingest(std::istream& in, const Resources& res) {
  IngestResult out;
  std::string raw;
  if (!std::getline(in, raw)) throw Error("ratings file is empty");
  std::string_view header = raw;
  if (header.ends_with('\r')) header.remove_suffix(1);
  if (header != kHeader) throw Error("ratings header must be '" + std::string(kHeader) + "'");

  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (line.ends_with('\r')) line.remove_suffix(1);
    if (line.empty()) continue;
    ++out.rows;
    try {
      const auto fields = split_commas(line);
      if (fields.size() != 4) throw Error("expected 4 fields, found " + std::to_string(fields.size()));
      if (fields[0].empty()) throw Error("empty domain");
      Source source;
      if (fields[1] == "cellular") source = Source::kCellular;
      else if (fields[1] == "directory") source = Source::kDirectory;
      else throw Error("unknown source '" + std::string(fields[1]) + "'");
      const auto rating = parse_score(fields[2], "rating");
      const auto confidence = parse_score(fields[3], "confidence");

      DomainRecord r = make_record(fields[0], res);
      r.source = source;
      r.rating = rating;
      r.confidence = confidence;
      r.label = label_for(source, rating);
      out.records.push_back(std::move(r));
    } catch (const Error& e) {
      ++out.skipped;
      out.diagnostics.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.rows > 0 && static_cast<double>(out.skipped) > kMaxSkipFraction * static_cast<double>(out.rows))
    throw Error("skipped " + std::to_string(out.skipped) + " of " + std::to_string(out.rows) +
                " rows (more than 10%); first problem: " + out.diagnostics.front());
  return out;
}

IngestResult ingest_file(const std::string& path, const Resources& res) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open ratings file: " + path);
  return ingest(in, res);
}

}  // namespace lexdom
