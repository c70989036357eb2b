#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "lexdom/error.hpp"
#include "lexdom/experiment.hpp"
#include "lexdom/model_io.hpp"
#include "lexdom/rng.hpp"
#include "lexdom/synthetic.hpp"
#include "support.hpp"

using namespace lexdom;
using lexdom::testing::resources;

namespace {

IngestResult ingest_text(const std::string& text) {
  std::istringstream in(text);
  return ingest(in, resources());
}

DomainRecord rated(int rating, int confidence) {
  DomainRecord r;
  r.source = Source::kCellular;
  r.rating = rating;
  r.confidence = confidence;
  r.label = label_for(r.source, r.rating);
  return r;
}

std::vector<DomainRecord> synthetic_records(std::size_t count, std::uint64_t seed) {
  synthetic::Options opt;
  opt.count = count;
  opt.suffixes = &resources().suffixes;
  const auto rows = synthetic::generate(resources().language.unigrams(), seed, opt);
  std::stringstream csv;
  synthetic::write_csv(csv, rows);
  return ingest(csv, resources()).records;
}

TrainOptions quick_options(std::uint64_t seed) {
  TrainOptions o;
  o.seed = seed;
  o.folds = 3;
  o.lambda_count = 15;
  o.lambda_ratio = 0.02;
  return o;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lexdom_test_" + name)).string();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("ingest labels rows by rating and source") {
  const auto res = ingest_text(
      "domain,source,rating,confidence\n"
      "badsite.com,cellular,59,15\n"
      "goodsite.com,cellular,60,15\n"
      "dmozsite.org,directory,,\n"
      "unrated.net,cellular,,\n");
  REQUIRE(res.records.size() == 4);
  CHECK(res.records[0].label == 1);
  CHECK(res.records[1].label == 0);
  CHECK(res.records[2].label == 0);
  CHECK(res.records[2].source == Source::kDirectory);
  CHECK_FALSE(res.records[3].label);
  CHECK(res.records[0].parsed.core == "badsite");
  CHECK(res.records[0].tokens == std::vector<std::string>{"bad", "site"});
  CHECK(res.skipped == 0);
}

TEST_CASE("ingest skips bad rows with diagnostics") {
  std::string text = "domain,source,rating,confidence\n";
  for (int i = 0; i < 20; ++i) text += "site" + std::to_string(i) + ".com,cellular,10,10\n";
  text += "co.uk,cellular,10,10\n";
  text += "x.com,cellular,101,10\n";
  const auto res = ingest_text(text);
  CHECK(res.rows == 22);
  CHECK(res.skipped == 2);
  CHECK(res.records.size() == 20);
  REQUIRE(res.diagnostics.size() == 2);
  CHECK(res.diagnostics[0].rfind("line 22", 0) == 0);
}

TEST_CASE("ingest hard errors") {
  CHECK_THROWS_AS(ingest_text("host,source,rating,confidence\n"), Error);
  CHECK_THROWS_AS(ingest_text("domain,source,rating,confidence\nco.uk,cellular,1,1\nok.com,cellular,1,1\n"), Error);
}

TEST_CASE("label rule over every rating") {
  for (int rating = 0; rating <= 100; ++rating) {
    CHECK(label_for(Source::kCellular, rating) == (rating < 60 ? 1 : 0));
    CHECK(label_for(Source::kDirectory, rating) == 0);
  }
  CHECK_FALSE(label_for(Source::kCellular, std::nullopt));
}

TEST_CASE("filtered membership over the full rating x confidence grid") {
  for (int rating = 0; rating <= 100; ++rating)
    for (int confidence = 0; confidence <= 100; ++confidence) {
      const bool expected = confidence >= 10 && (rating < 40 || rating >= 60);
      CHECK(in_filtered_set(rated(rating, confidence)) == expected);
    }
  DomainRecord dir;
  dir.source = Source::kDirectory;
  dir.label = 0;
  CHECK_FALSE(in_filtered_set(dir));
}

TEST_CASE("80/20 splits are disjoint, sized and reproducible") {
  std::vector<DomainRecord> recs;
  Rng rng(3);
  for (int i = 0; i < 501; ++i) {
    auto r = rated(static_cast<int>(rng.below(101)), static_cast<int>(rng.below(101)));
    r.raw = "d" + std::to_string(i) + ".com";
    recs.push_back(r);
  }
  for (int i = 0; i < 50; ++i) {
    DomainRecord d;
    d.source = Source::kDirectory;
    d.label = 0;
    d.raw = "dir" + std::to_string(i) + ".org";
    recs.push_back(d);
  }
  for (bool stratify : {false, true}) {
    const auto s = build_experiment(recs, ExperimentName::kUnfiltered, 9, {.stratify = stratify});
    std::set<std::string> train, test;
    for (const auto& r : s.train) train.insert(r.raw);
    for (const auto& r : s.test) test.insert(r.raw);
    CHECK(train.size() + test.size() == 501);
    for (const auto& t : test) CHECK_FALSE(train.contains(t));
    CHECK(std::abs(static_cast<double>(s.test.size()) - 501 * 0.2) <= 2.0);
    for (const auto& r : s.train) CHECK(r.source == Source::kCellular);
  }
  const auto f = build_experiment(recs, ExperimentName::kFiltered, 9);
  for (const auto& r : f.train) CHECK(in_filtered_set(r));
  for (const auto& r : f.test) CHECK(in_filtered_set(r));

  const auto a = build_experiment(recs, ExperimentName::kUnfiltered, 9);
  const auto b = build_experiment(recs, ExperimentName::kUnfiltered, 9);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t i = 0; i < a.test.size(); ++i) CHECK(a.test[i].raw == b.test[i].raw);
}

TEST_CASE("balanced split sizes and shortfall errors") {
  std::vector<DomainRecord> recs;
  for (int i = 0; i < 30; ++i) {
    auto r = rated(10, 50);
    r.raw = "m" + std::to_string(i);
    recs.push_back(r);
    DomainRecord d;
    d.source = Source::kDirectory;
    d.label = 0;
    d.raw = "d" + std::to_string(i);
    recs.push_back(d);
  }
  const auto s = build_experiment(recs, ExperimentName::kBalanced, 1, {.balanced_size = 10});
  CHECK(s.train.size() == 20);
  CHECK(s.test.size() == 20);
  std::size_t mal = 0;
  for (const auto& r : s.train) mal += r.label == 1;
  CHECK(mal == 10);
  try {
    build_experiment(recs, ExperimentName::kBalanced, 1, {.balanced_size = 20});
    FAIL("expected a shortfall error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("short by 10") != std::string::npos);
  }
}

TEST_CASE("model matrix definitions") {
  const auto& ms = standard_models();
  REQUIRE(ms.size() == 7);
  using features::FeatureSet;
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::popcount(ms[i].enabled.bits()) == 1);
  CHECK(ms[5].enabled == features::FeatureSets{FeatureSet::kBasic, FeatureSet::kChars, FeatureSet::kTld,
                                               FeatureSet::kLoglik});
  CHECK(ms[6].enabled == features::FeatureSets::all());
  CHECK(find_model("M5").enabled == features::FeatureSets{FeatureSet::kWords});
  CHECK_THROWS_AS(find_model("M8"), Error);
}

TEST_CASE("synthetic generator") {
  synthetic::Options opt;
  opt.count = 2000;
  const auto rows = synthetic::generate(resources().language.unigrams(), 17, opt);
  CHECK(rows.size() == 2000);
  std::set<std::string> domains;
  std::size_t pos = 0;
  for (const auto& r : rows) {
    domains.insert(r.domain);
    pos += r.label;
    CHECK((r.label == 1) == (r.rating < 60));
  }
  CHECK(domains.size() == rows.size());
  CHECK(pos > 350);
  CHECK(pos < 650);
  const auto again = synthetic::generate(resources().language.unigrams(), 17, opt);
  CHECK(again.front().domain == rows.front().domain);
  CHECK(again.back().domain == rows.back().domain);
  CHECK(synthetic::planted_words().size() == 20);
}

TEST_CASE("synthetic domains are registrable when a suffix list is given") {
  synthetic::Options opt;
  opt.count = 5000;
  opt.suffixes = &resources().suffixes;
  for (const auto& r : synthetic::generate(resources().language.unigrams(), 3, opt))
    CHECK(resources().suffixes.registrable_domain(r.domain) == r.domain);
}

TEST_CASE("train, report, score and persist") {
  const auto records = synthetic_records(1500, 5);
  const auto split = build_experiment(records, ExperimentName::kUnfiltered, 5);
  const ModelSpec specs[] = {find_model("M1"), find_model("M7")};
  const auto run = run_matrix(split, specs, resources(), quick_options(5));
  REQUIRE(run.report.rows.size() == 2);
  CHECK(run.report.rows[0].features == run.models[0].space.column_count());
  CHECK(run.report.rows[1].auc > run.report.rows[0].auc);
  CHECK(run.report.to_text() == run_matrix(split, specs, resources(), quick_options(5)).report.to_text());

  const auto& tm = run.models[1];
  const Scorer scorer(resources(), tm.space, tm.model);
  const auto rep = report_coefficients(tm.model, tm.space, 20);
  CHECK_FALSE(rep.malicious.empty());
  for (std::size_t i = 1; i < rep.malicious.size(); ++i)
    CHECK(rep.malicious[i - 1].coefficient >= rep.malicious[i].coefficient);
  for (std::size_t i = 1; i < rep.benign.size(); ++i) CHECK(rep.benign[i - 1].coefficient <= rep.benign[i].coefficient);

  const auto path = temp_path("model.json");
  save_model(path, tm.model, tm.space);
  const auto loaded = load_model(path);
  const Scorer reloaded(resources(), loaded.space, loaded.model);
  for (const auto& r : split.test) CHECK(scorer.score(r) == reloaded.score(r));
  CHECK(scorer.score("www.casino-bonus.com") == reloaded.score("casino-bonus.com"));

  // Truncated and mismatched files.
  std::string text;
  {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  CHECK_THROWS_AS(model_from_json(text.substr(0, text.size() - 40)), FormatError);
  auto bumped = text;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
  CHECK_THROWS_AS(model_from_json(bumped), FormatError);
  CHECK_THROWS_AS(Scorer(resources(), run.models[0].space, tm.model), FingerprintMismatch);
  CHECK_THROWS_AS(report_coefficients(tm.model, run.models[0].space, 5), FingerprintMismatch);
  std::filesystem::remove(path);
}

TEST_CASE("coefficient report edge cases") {
  std::vector<features::DomainFeatures> rows = {
      features::describe("payday", "com", nullptr, std::vector<std::string>{"payday"})};
  const auto fs = features::fit_feature_space(rows, {features::FeatureSet::kWords});
  lasso::LassoModel m;
  m.feature_fingerprint = fs.fingerprint();
  auto rep = report_coefficients(m, fs, 10);
  CHECK(rep.malicious.empty());
  CHECK(rep.benign.empty());
  m.coefficients[0] = 1.5;
  rep = report_coefficients(m, fs, 10);
  REQUIRE(rep.malicious.size() == 1);
  CHECK(rep.malicious[0].name == "word:\"payday\"");
}

}  // TEST_SUITE
