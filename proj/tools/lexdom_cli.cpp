// lexdom: command-line front end for segmentation, featurization, training,
// scoring, evaluation, experiments and coefficient reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lexdom/dataset.hpp"
#include "lexdom/error.hpp"
#include "lexdom/experiment.hpp"
#include "lexdom/kernels.hpp"
#include "lexdom/metrics.hpp"
#include "lexdom/model_io.hpp"
#include "lexdom/segmenter.hpp"
#include "lexdom/synthetic.hpp"

#ifndef LEXDOM_DATA_DIR
#define LEXDOM_DATA_DIR "data"
#endif

namespace {

using namespace lexdom;

struct CommonArgs {
  std::string psl = LEXDOM_DATA_DIR "/public_suffix_list.dat";
  std::string unigrams = LEXDOM_DATA_DIR "/unigrams.txt";
  std::string bigrams = LEXDOM_DATA_DIR "/bigrams.txt";
  std::size_t unigram_limit = corpus::kDefaultUnigramLimit;
  bool icann_only = false;
  std::string kernels = "auto";

  void add_to(CLI::App& app) {
    app.add_option("--psl", psl, "Public suffix list file")->capture_default_str();
    app.add_option("--unigrams", unigrams, "Unigram counts (word<TAB>count)")->capture_default_str();
    app.add_option("--bigrams", bigrams, "Bigram counts (w1 w2<TAB>count)")->capture_default_str();
    app.add_option("--unigram-limit", unigram_limit, "Keep the first K unigram lines")->capture_default_str();
    app.add_flag("--icann-only", icann_only, "Ignore the private section of the suffix list");
    app.add_option("--kernels", kernels, "Numeric kernels: auto, scalar, avx2")->capture_default_str();
  }

  Resources load() const {
    return Resources::load({.psl = psl,
                            .unigrams = unigrams,
                            .bigrams = bigrams,
                            .unigram_limit = unigram_limit,
                            .include_private_suffixes = !icann_only,
                            .markov = {}});
  }
};

struct TrainArgs {
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  double lambda_ratio = 0.01;
  std::size_t lambda_count = 100;
  std::size_t min_word_count = 1;

  void add_to(CLI::App& app) {
    app.add_option("--seed", seed, "Seed for fold assignment and splits")->required();
    app.add_option("--folds", folds, "Cross-validation folds")->capture_default_str()->check(CLI::Range(2, 1000));
    app.add_option("--lambda-ratio", lambda_ratio, "Smallest lambda as a fraction of lambda_max")
        ->capture_default_str()
        ->check(CLI::Range(1e-8, 1.0));
    app.add_option("--lambda-count", lambda_count, "Points on the lambda path")->capture_default_str();
    app.add_option("--min-word-count", min_word_count, "Drop words seen in fewer training domains")
        ->capture_default_str();
  }

  TrainOptions options(const std::string& kernels) const {
    TrainOptions o;
    o.seed = seed;
    o.folds = folds;
    o.lambda_ratio = lambda_ratio;
    o.lambda_count = lambda_count;
    o.min_word_count = min_word_count;
    o.fit.kernels = &kernels::select(kernels);
    return o;
  }
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  return s.substr(i);
}

IngestResult ingest_reported(const std::string& path, const Resources& res) {
  auto result = ingest_file(path, res);
  for (const auto& d : result.diagnostics) std::cerr << path << ": " << d << '\n';
  if (result.skipped > 0) std::cerr << path << ": skipped " << result.skipped << " of " << result.rows << " rows\n";
  return result;
}

std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", p);
  return buf;
}

int cmd_segment(const CommonArgs& common) {
  const auto res = common.load();
  std::string line;
  int failures = 0;
  while (std::getline(std::cin, line)) {
    line = trim(line);
    if (line.empty()) continue;
    try {
      const auto record = make_record(line, res);
      std::cout << line << '\t';
      for (std::size_t i = 0; i < record.tokens.size(); ++i) std::cout << (i ? " " : "") << record.tokens[i];
      std::cout << '\n';
    } catch (const Error& e) {
      std::cerr << line << ": " << e.what() << '\n';
      ++failures;
    }
  }
  return failures > 0 ? 2 : 0;
}

struct FeaturizeArgs {
  std::string data;
  std::string space_in;
  std::string space_out;
  std::string feature_sets = "basic,chars,tld,loglik,words";
  std::size_t min_word_count = 1;
};

int cmd_featurize(const CommonArgs& common, const FeaturizeArgs& args) {
  const auto res = common.load();
  std::vector<DomainRecord> records;
  if (!args.data.empty()) {
    records = ingest_reported(args.data, res).records;
  } else {
    std::string line;
    while (std::getline(std::cin, line)) {
      line = trim(line);
      if (line.empty()) continue;
      try {
        records.push_back(make_record(line, res));
      } catch (const Error& e) {
        std::cerr << line << ": " << e.what() << '\n';
      }
    }
  }

  std::optional<features::FeatureSpace> space;
  if (!args.space_in.empty()) {
    space = load_feature_space(args.space_in);
  } else {
    if (args.space_out.empty()) throw Error("featurize needs --space to reuse a feature space or --space-out to fit one");
    const auto enabled = features::FeatureSets::parse(args.feature_sets);
    std::vector<features::DomainFeatures> rows;
    for (const auto& r : records) rows.push_back(describe_record(r, res, enabled));
    space = features::fit_feature_space(rows, enabled, args.min_word_count);
  }
  if (!args.space_out.empty()) save_feature_space(args.space_out, *space);

  std::string out;
  for (const auto& r : records) {
    const auto v = features::vectorize(describe_record(r, res, space->enabled()), *space);
    out += r.raw;
    out += '\t';
    for (std::size_t i = 0; i < v.indices.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(v.indices[i]);
      out += ":1";
    }
    out += '\n';
  }
  std::cout << out;
  return 0;
}

struct ModelArgs {
  std::string data;
  std::string model_out;
  std::string feature_sets = "basic,chars,tld,loglik,words";
  bool use_min = false;
};

int cmd_train(const CommonArgs& common, const TrainArgs& targs, const ModelArgs& args) {
  const auto res = common.load();
  const auto data = ingest_reported(args.data, res);
  const auto enabled = features::FeatureSets::parse(args.feature_sets);
  const auto tm = train(data.records, enabled, res, targs.options(common.kernels));
  const auto& chosen = args.use_min ? tm.min_model : tm.model;
  save_model(args.model_out, chosen, tm.space);

  const auto one_se = lasso::one_se_index(tm.cv);
  const auto best = lasso::best_index(tm.cv);
  std::printf("feature sets   %s\n", enabled.to_string().c_str());
  std::printf("columns        %zu\n", tm.space.column_count());
  std::printf("lambda_1se     %.6g  cv auc %.4f (se %.4f)  nonzero %zu\n", tm.model.lambda, tm.cv.mean_auc[one_se],
              tm.cv.se_auc[one_se], tm.model.coefficients.size());
  std::printf("lambda_min     %.6g  cv auc %.4f (se %.4f)  nonzero %zu\n", tm.min_model.lambda, tm.cv.mean_auc[best],
              tm.cv.se_auc[best], tm.min_model.coefficients.size());
  std::printf("saved          %s (%s)\n", args.model_out.c_str(), args.use_min ? "lambda_min" : "lambda_1se");
  return 0;
}

int cmd_predict(const CommonArgs& common, const std::string& model_path) {
  const auto res = common.load();
  auto saved = load_model(model_path);
  const Scorer scorer(res, std::move(saved.space), std::move(saved.model));

  std::string line, out;
  int failures = 0;
  while (std::getline(std::cin, line)) {
    line = trim(line);
    if (line.empty()) continue;
    try {
      const double p = scorer.score(line);
      out += line;
      out += '\t';
      out += format_prob(p);
      out += '\n';
    } catch (const Error& e) {
      std::cerr << line << ": " << e.what() << '\n';
      ++failures;
    }
    if (out.size() > (1u << 16)) {
      std::cout << out;
      out.clear();
    }
  }
  std::cout << out;
  return failures > 0 ? 2 : 0;
}

struct EvaluateArgs {
  std::string model;
  std::string data;
  double threshold = 0.5;
  std::string roc_out;
  std::string json_out;
};

int cmd_evaluate(const CommonArgs& common, const EvaluateArgs& args) {
  const auto res = common.load();
  auto saved = load_model(args.model);
  const Scorer scorer(res, std::move(saved.space), std::move(saved.model));
  const auto data = ingest_reported(args.data, res);

  std::vector<double> probs;
  std::vector<int> labels;
  for (const auto& r : data.records) {
    if (!r.label) continue;
    probs.push_back(scorer.score(r));
    labels.push_back(*r.label);
  }
  const double mcr = metrics::mcr(probs, labels, args.threshold);
  const double auc = metrics::auc(probs, labels);
  const auto roc = metrics::roc_curve(probs, labels);

  std::printf("records    %zu\nthreshold  %.3f\nMCR        %.6f\nAUC        %.6f\n", probs.size(), args.threshold, mcr,
              auc);
  if (!args.roc_out.empty()) {
    auto out = open_out(args.roc_out);
    char buf[64];
    for (const auto& p : roc.points) {
      std::snprintf(buf, sizeof buf, "%.10g\t%.10g\n", p.first, p.second);
      out << buf;
    }
  }
  if (!args.json_out.empty()) {
    nlohmann::ordered_json j;
    j["records"] = probs.size();
    j["threshold"] = args.threshold;
    j["mcr"] = mcr;
    j["auc"] = auc;
    j["model"] = args.model;
    open_out(args.json_out) << j.dump(2) << '\n';
  }
  return 0;
}

struct ExperimentArgs {
  std::string data;
  std::string name = "unfiltered";
  std::string models = "M1,M2,M3,M4,M5,M6,M7";
  std::size_t balanced_size = 15'000;
  bool stratify = false;
  double threshold = 0.5;
  std::string report_out;
  std::string json_out;
  std::string model_dir;
};

int cmd_experiment(const CommonArgs& common, const TrainArgs& targs, const ExperimentArgs& args) {
  const auto res = common.load();
  const auto data = ingest_reported(args.data, res);
  const auto split = build_experiment(data.records, parse_experiment_name(args.name), targs.seed,
                                      {.balanced_size = args.balanced_size, .stratify = args.stratify});

  std::vector<ModelSpec> specs;
  std::string_view rest = args.models;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    specs.push_back(find_model(rest.substr(0, comma)));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }

  const auto run = run_matrix(split, specs, res, targs.options(common.kernels), args.threshold);
  const auto text = run.report.to_text();
  std::cout << text;
  if (!args.report_out.empty()) open_out(args.report_out) << text;
  if (!args.json_out.empty()) open_out(args.json_out) << run.report.to_json();
  if (!args.model_dir.empty()) {
    for (std::size_t i = 0; i < specs.size(); ++i)
      save_model(args.model_dir + "/" + specs[i].id + ".json", run.models[i].model, run.models[i].space);
  }
  return 0;
}

int cmd_coefficients(const std::string& model_path, std::size_t top) {
  const auto saved = load_model(model_path);
  const auto rep = report_coefficients(saved.model, saved.space, top);
  std::printf("intercept\t%.6f\nlambda\t%.6g\n", saved.model.intercept, saved.model.lambda);
  std::printf("# malicious (%zu)\n", rep.malicious.size());
  for (std::size_t i = 0; i < rep.malicious.size(); ++i)
    std::printf("%zu\t%s\t%.6f\n", i + 1, rep.malicious[i].name.c_str(), rep.malicious[i].coefficient);
  std::printf("# benign (%zu)\n", rep.benign.size());
  for (std::size_t i = 0; i < rep.benign.size(); ++i)
    std::printf("%zu\t%s\t%.6f\n", i + 1, rep.benign[i].name.c_str(), rep.benign[i].coefficient);
  return 0;
}

int cmd_synthesize(const CommonArgs& common, std::uint64_t seed, std::size_t count, const std::string& out_path) {
  const auto unigrams = corpus::load_unigrams_file(common.unigrams, common.unigram_limit);
  const auto suffixes = psl::load_psl_file(common.psl, {.include_private = !common.icann_only});
  synthetic::Options opt;
  opt.count = count;
  opt.suffixes = &suffixes;
  const auto rows = synthetic::generate(unigrams, seed, opt);
  if (out_path.empty()) {
    synthetic::write_csv(std::cout, rows);
  } else {
    auto out = open_out(out_path);
    synthetic::write_csv(out, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical malicious-domain classifier"};
  app.require_subcommand(1);

  CommonArgs common;
  TrainArgs targs;
  FeaturizeArgs fargs;
  ModelArgs margs;
  EvaluateArgs eargs;
  ExperimentArgs xargs;
  std::string model_path;
  std::size_t top = 50;
  std::uint64_t synth_seed = 0;
  std::size_t synth_count = 10'000;
  std::string synth_out;

  auto* segment = app.add_subcommand("segment", "Segment hostnames from stdin: host<TAB>tokens");
  common.add_to(*segment);

  auto* featurize = app.add_subcommand("featurize", "Sparse feature vectors: host<TAB>idx:1 ...");
  common.add_to(*featurize);
  featurize->add_option("--data", fargs.data, "Ratings CSV (default: hostnames on stdin)");
  featurize->add_option("--space", fargs.space_in, "Existing feature-space JSON to apply");
  featurize->add_option("--space-out", fargs.space_out, "Write the (fitted) feature space here");
  featurize->add_option("--feature-sets", fargs.feature_sets, "Families to fit")->capture_default_str();
  featurize->add_option("--min-word-count", fargs.min_word_count, "Word vocabulary cutoff")->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "Fit a lasso model on a ratings CSV");
  common.add_to(*train_cmd);
  targs.add_to(*train_cmd);
  train_cmd->add_option("--data", margs.data, "Ratings CSV")->required();
  train_cmd->add_option("--model-out", margs.model_out, "Model JSON to write")->required();
  train_cmd->add_option("--feature-sets", margs.feature_sets, "Families to use")->capture_default_str();
  train_cmd->add_flag("--lambda-min", margs.use_min, "Save the best-CV lambda instead of the one-SE lambda");

  auto* predict = app.add_subcommand("predict", "Score hostnames from stdin: host<TAB>probability");
  common.add_to(*predict);
  predict->add_option("--model", model_path, "Model JSON")->required();

  auto* evaluate = app.add_subcommand("evaluate", "MCR, AUC and ROC of a model on a ratings CSV");
  common.add_to(*evaluate);
  evaluate->add_option("--model", eargs.model, "Model JSON")->required();
  evaluate->add_option("--data", eargs.data, "Ratings CSV")->required();
  evaluate->add_option("--threshold", eargs.threshold, "Decision threshold")->capture_default_str();
  evaluate->add_option("--roc-out", eargs.roc_out, "ROC points file (fpr<TAB>tpr)");
  evaluate->add_option("--json-out", eargs.json_out, "Machine-readable report");

  auto* experiment = app.add_subcommand("experiment", "Run the model matrix on one experiment split");
  common.add_to(*experiment);
  targs.add_to(*experiment);
  experiment->add_option("--data", xargs.data, "Ratings CSV")->required();
  experiment->add_option("--name", xargs.name, "balanced, unfiltered or filtered")->capture_default_str();
  experiment->add_option("--models", xargs.models, "Comma-separated model ids")->capture_default_str();
  experiment->add_option("--balanced-size", xargs.balanced_size, "Per-group sample size B")->capture_default_str();
  experiment->add_flag("--stratify", xargs.stratify, "Stratify 80/20 splits by label");
  experiment->add_option("--threshold", xargs.threshold, "Decision threshold")->capture_default_str();
  experiment->add_option("--report-out", xargs.report_out, "Write the text report here");
  experiment->add_option("--json-out", xargs.json_out, "Write the JSON report here");
  experiment->add_option("--model-dir", xargs.model_dir, "Save each fitted model as <dir>/<id>.json");

  auto* coefficients = app.add_subcommand("coefficients", "Largest positive and negative coefficients");
  coefficients->add_option("--model", model_path, "Model JSON")->required();
  coefficients->add_option("--top", top, "Entries per side")->capture_default_str();

  auto* synthesize = app.add_subcommand("synthesize", "Write a synthetic planted-word ratings CSV");
  common.add_to(*synthesize);
  synthesize->add_option("--seed", synth_seed, "Generator seed")->required();
  synthesize->add_option("--count", synth_count, "Number of domains")->capture_default_str();
  synthesize->add_option("--out", synth_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*segment) return cmd_segment(common);
    if (*featurize) return cmd_featurize(common, fargs);
    if (*train_cmd) return cmd_train(common, targs, margs);
    if (*predict) return cmd_predict(common, model_path);
    if (*evaluate) return cmd_evaluate(common, eargs);
    if (*experiment) return cmd_experiment(common, targs, xargs);
    if (*coefficients) return cmd_coefficients(model_path, top);
    if (*synthesize) return cmd_synthesize(common, synth_seed, synth_count, synth_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
