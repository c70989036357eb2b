#include "lexdom/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json.hpp"
#include "lexdom/error.hpp"
#include "lexdom/metrics.hpp"
#include "lexdom/rng.hpp"

namespace lexdom {
namespace {

using features::FeatureSet;
using features::FeatureSets;

std::vector<DomainRecord> pick(std::span<const DomainRecord> all, std::span<const std::size_t> idx) {
  std::vector<DomainRecord> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

std::size_t test_share(std::size_t n) { return (n + 2) / 5; }  // round(n / 5)

// 80/20 split of `pool` (indices into records) after a seeded shuffle.
void split_80_20(std::span<const DomainRecord> records, std::vector<std::size_t> pool, Rng& rng, bool stratify,
                 ExperimentSplit& out) {
  std::vector<std::size_t> train, test;
  auto deal = [&](std::vector<std::size_t>& group) {
    rng.shuffle(std::span(group));
    const std::size_t n_test = test_share(group.size());
    test.insert(test.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), group.begin() + static_cast<std::ptrdiff_t>(n_test), group.end());
  };
  if (stratify) {
    std::vector<std::size_t> pos, neg;
    for (auto i : pool) (*records[i].label == 1 ? pos : neg).push_back(i);
    deal(pos);
    deal(neg);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
  } else {
    deal(pool);
  }
  if (train.empty() || test.empty()) throw Error("experiment needs at least 2 eligible records, found " +
                                                 std::to_string(pool.size()));
  out.train = pick(records, train);
  out.test = pick(records, test);
}

std::vector<double> to_double_labels(std::span<const int> labels) { return {labels.begin(), labels.end()}; }

double base_rate(std::span<const DomainRecord> rs) {
  if (rs.empty()) return 0.0;
  std::size_t pos = 0;
  for (const auto& r : rs) pos += r.label.value_or(0) == 1;
  return static_cast<double>(pos) / static_cast<double>(rs.size());
}

}  // namespace

std::string_view to_string(ExperimentName e) {
  switch (e) {
    case ExperimentName::kBalanced: return "balanced";
    case ExperimentName::kUnfiltered: return "unfiltered";
    case ExperimentName::kFiltered: return "filtered";
  }
  return "unknown";
}

ExperimentName parse_experiment_name(std::string_view name) {
  if (name == "balanced") return ExperimentName::kBalanced;
  if (name == "unfiltered") return ExperimentName::kUnfiltered;
  if (name == "filtered") return ExperimentName::kFiltered;
  throw Error("unknown experiment '" + std::string(name) + "' (balanced, unfiltered, filtered)");
}

bool in_filtered_set(const DomainRecord& r) {
  if (r.source != Source::kCellular || !r.rating || !r.confidence) return false;
  return *r.confidence >= 10 && (*r.rating < 40 || *r.rating >= 60);
}

ExperimentSplit build_experiment(std::span<const DomainRecord> records, ExperimentName name, std::uint64_t seed,
                                 const ExperimentOptions& options) {
  ExperimentSplit out;
  out.name = name;
  out.seed = seed;
  Rng rng(seed);

  if (name == ExperimentName::kBalanced) {
    const std::size_t b = options.balanced_size;
    if (b == 0) throw Error("balanced experiment size must be positive");
    std::vector<std::size_t> malicious, directory;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (r.source == Source::kCellular && r.label == 1) malicious.push_back(i);
      else if (r.source == Source::kDirectory) directory.push_back(i);
    }
    for (const auto& [group, what] : {std::pair{&malicious, "malicious cellular"}, std::pair{&directory, "directory"}})
      if (group->size() < 2 * b)
        throw Error("balanced experiment needs " + std::to_string(2 * b) + " " + what + " records, found " +
                    std::to_string(group->size()) + " (short by " + std::to_string(2 * b - group->size()) + ")");
    std::vector<std::size_t> train, test;
    for (auto* group : {&malicious, &directory}) {
      rng.shuffle(std::span(*group));
      train.insert(train.end(), group->begin(), group->begin() + static_cast<std::ptrdiff_t>(b));
      test.insert(test.end(), group->begin() + static_cast<std::ptrdiff_t>(b),
                  group->begin() + static_cast<std::ptrdiff_t>(2 * b));
    }
    out.train = pick(records, train);
    out.test = pick(records, test);
    return out;
  }

  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.source != Source::kCellular || !r.label) continue;
    if (name == ExperimentName::kFiltered && !in_filtered_set(r)) continue;
    pool.push_back(i);
  }
  split_80_20(records, std::move(pool), rng, options.stratify, out);
  return out;
}

const std::vector<ModelSpec>& standard_models() {
  static const std::vector<ModelSpec> specs = {
      {"M1", {FeatureSet::kBasic}},
      {"M2", {FeatureSet::kChars}},
      {"M3", {FeatureSet::kTld}},
      {"M4", {FeatureSet::kLoglik}},
      {"M5", {FeatureSet::kWords}},
      {"M6", {FeatureSet::kBasic, FeatureSet::kChars, FeatureSet::kTld, FeatureSet::kLoglik}},
      {"M7", FeatureSets::all()},
  };
  return specs;
}

ModelSpec find_model(std::string_view id) {
  for (const auto& s : standard_models())
    if (s.id == id) return s;
  throw Error("unknown model '" + std::string(id) + "' (M1..M7)");
}

TrainedModel train(std::span<const features::DomainFeatures> rows, std::span<const int> labels,
                   FeatureSets enabled, const TrainOptions& options) {
  if (rows.size() != labels.size()) throw Error("feature rows and labels differ in length");
  TrainedModel out{features::fit_feature_space(rows, enabled, options.min_word_count), {}, {}, {}};

  std::vector<features::SparseVector> vectors;
  vectors.reserve(rows.size());
  for (const auto& r : rows) vectors.push_back(features::vectorize(r, out.space));
  const lasso::BinaryMatrix x(out.space.column_count(), vectors);
  const auto y = to_double_labels(labels);

  const auto lambdas = lasso::lambda_path(lasso::lambda_max(x, y), options.lambda_count, options.lambda_ratio);
  out.cv = lasso::cross_validate(x, y, lambdas, options.folds, options.seed, options.fit);
  const std::size_t one_se = lasso::one_se_index(out.cv);
  const std::size_t best = lasso::best_index(out.cv);
  const std::size_t last = std::max(one_se, best);

  auto path = lasso::fit_path(x, y, std::span(lambdas).first(last + 1), options.fit);
  out.model = std::move(path.models[one_se]);
  out.min_model = std::move(path.models[best]);
  for (auto* m : {&out.model, &out.min_model}) {
    m->feature_fingerprint = out.space.fingerprint();
    m->meta.seed = options.seed;
  }
  return out;
}

TrainedModel train(std::span<const DomainRecord> records, FeatureSets enabled, const Resources& res,
                   const TrainOptions& options) {
  std::vector<features::DomainFeatures> rows;
  std::vector<int> labels;
  rows.reserve(records.size());
  for (const auto& r : records) {
    if (!r.label) continue;
    rows.push_back(describe_record(r, res, enabled));
    labels.push_back(*r.label);
  }
  return train(rows, labels, enabled, options);
}

MatrixRun run_matrix(const ExperimentSplit& split, std::span<const ModelSpec> specs, const Resources& res,
                     const TrainOptions& options, double threshold) {
  FeatureSets needed;
  for (const auto& s : specs) needed = needed | s.enabled;

  auto describe_all = [&](const std::vector<DomainRecord>& rs, std::vector<features::DomainFeatures>& rows,
                          std::vector<int>& labels) {
    for (const auto& r : rs) {
      if (!r.label) throw Error("experiment record '" + r.raw + "' has no label");
      rows.push_back(describe_record(r, res, needed));
      labels.push_back(*r.label);
    }
  };
  std::vector<features::DomainFeatures> train_rows, test_rows;
  std::vector<int> train_labels, test_labels;
  describe_all(split.train, train_rows, train_labels);
  describe_all(split.test, test_rows, test_labels);

  MatrixRun run;
  auto& rep = run.report;
  rep.experiment = std::string(to_string(split.name));
  rep.seed = options.seed;
  rep.train_size = split.train.size();
  rep.test_size = split.test.size();
  rep.train_base_rate = base_rate(split.train);
  rep.test_base_rate = base_rate(split.test);
  rep.threshold = threshold;

  for (const auto& spec : specs) {
    TrainedModel tm = train(train_rows, train_labels, spec.enabled, options);
    auto evaluate = [&](const lasso::LassoModel& m, double& mcr, double& auc) {
      std::vector<double> probs;
      probs.reserve(test_rows.size());
      for (const auto& r : test_rows)
        probs.push_back(lasso::predict_prob(m, features::vectorize(r, tm.space), tm.space.fingerprint()));
      mcr = metrics::mcr(probs, test_labels, threshold);
      auc = metrics::auc(probs, test_labels);
    };
    MatrixRow row;
    row.id = spec.id;
    row.feature_sets = spec.enabled.to_string();
    row.features = tm.space.column_count();
    evaluate(tm.model, row.mcr, row.auc);
    row.nonzero = tm.model.coefficients.size();
    row.lambda = tm.model.lambda;
    evaluate(tm.min_model, row.mcr_min, row.auc_min);
    row.nonzero_min = tm.min_model.coefficients.size();
    row.lambda_min = tm.min_model.lambda;
    rep.rows.push_back(row);
    run.models.push_back(std::move(tm));
  }
  return run;
}

std::string MatrixReport::to_text() const {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "experiment %s  seed %llu  threshold %.3f\n", experiment.c_str(),
                static_cast<unsigned long long>(seed), threshold);
  out += buf;
  std::snprintf(buf, sizeof buf, "train %zu (malicious rate %.4f)  test %zu (malicious rate %.4f)\n\n", train_size,
                train_base_rate, test_size, test_base_rate);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-5s %-28s %7s %7s %10s %8s %12s | %7s %7s %8s %12s\n", "model", "feature sets",
                "MCR", "AUC", "#features", "#nonzero", "lambda_1se", "MCR", "AUC", "#nonzero", "lambda_min");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-5s %-28s %7.4f %7.4f %10zu %8zu %12.6g | %7.4f %7.4f %8zu %12.6g\n",
                  r.id.c_str(), r.feature_sets.c_str(), r.mcr, r.auc, r.features, r.nonzero, r.lambda, r.mcr_min,
                  r.auc_min, r.nonzero_min, r.lambda_min);
    out += buf;
  }
  return out;
}

std::string MatrixReport::to_json() const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["threshold"] = threshold;
  j["train_size"] = train_size;
  j["test_size"] = test_size;
  j["train_base_rate"] = train_base_rate;
  j["test_base_rate"] = test_base_rate;
  auto& arr = j["models"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json m;
    m["id"] = r.id;
    m["feature_sets"] = r.feature_sets;
    m["mcr"] = r.mcr;
    m["auc"] = r.auc;
    m["features"] = r.features;
    m["nonzero"] = r.nonzero;
    m["lambda"] = r.lambda;
    m["mcr_min"] = r.mcr_min;
    m["auc_min"] = r.auc_min;
    m["nonzero_min"] = r.nonzero_min;
    m["lambda_min"] = r.lambda_min;
    arr.push_back(std::move(m));
  }
  return j.dump(2) + "\n";
}

CoefficientReport report_coefficients(const lasso::LassoModel& model, const features::FeatureSpace& space,
                                      std::size_t top_n) {
  if (model.feature_fingerprint != space.fingerprint())
    throw FingerprintMismatch("model fingerprint " + model.feature_fingerprint + " does not match feature space " +
                              space.fingerprint());
  CoefficientReport rep;
  for (const auto& [col, beta] : model.coefficients) {
    if (beta == 0.0) continue;
    RankedFeature f{col, space.column_name(col), beta};
    (beta > 0 ? rep.malicious : rep.benign).push_back(std::move(f));
  }
  auto by_size = [](const RankedFeature& a, const RankedFeature& b) {
    if (std::abs(a.coefficient) != std::abs(b.coefficient)) return std::abs(a.coefficient) > std::abs(b.coefficient);
    return a.column < b.column;
  };
  std::sort(rep.malicious.begin(), rep.malicious.end(), by_size);
  std::sort(rep.benign.begin(), rep.benign.end(), by_size);
  if (rep.malicious.size() > top_n) rep.malicious.resize(top_n);
  if (rep.benign.size() > top_n) rep.benign.resize(top_n);
  return rep;
}

Scorer::Scorer(const Resources& res, features::FeatureSpace space, lasso::LassoModel model)
    : res_(res), space_(std::move(space)), model_(std::move(model)), dense_(space_.column_count(), 0.0) {
  if (model_.feature_fingerprint != space_.fingerprint())
    throw FingerprintMismatch("model fingerprint " + model_.feature_fingerprint + " does not match feature space " +
                              space_.fingerprint());
  for (const auto& [col, beta] : model_.coefficients) {
    if (col >= dense_.size()) throw FormatError("coefficient column " + std::to_string(col) + " out of range");
    dense_[col] = beta;
  }
}

double Scorer::score(const DomainRecord& record) const {
  const auto f = describe_record(record, res_, space_.enabled());
  double eta = model_.intercept;
  for (auto j : features::vectorize(f, space_).indices) eta += dense_[j];
  return 1.0 / (1.0 + std::exp(-eta));
}

double Scorer::score(std::string_view host) const {
  DomainRecord r;
  r.raw = std::string(host);
  r.parsed = psl::effective_2ld(psl::extract_hostname(host), res_.suffixes);
  if (space_.enabled().has(FeatureSet::kWords))
    r.tokens = segmenter::segment_core(r.parsed.core, res_.language, res_.max_token_len);
  return score(r);
}

}  // namespace lexdom
