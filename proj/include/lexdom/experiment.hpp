#pragma once

// Experiment splits, the M1-M7 model matrix, training with cross-validated
// penalty selection, scoring, and coefficient reports.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexdom/dataset.hpp"
#include "lexdom/features.hpp"
#include "lexdom/lasso.hpp"

namespace lexdom {

enum class ExperimentName { kBalanced, kUnfiltered, kFiltered };

std::string_view to_string(ExperimentName e);
ExperimentName parse_experiment_name(std::string_view name);

struct ExperimentOptions {
  std::size_t balanced_size = 15'000;  ///< B: per-group records in each of train and test
  bool stratify = false;               ///< stratify the 80/20 splits by label
};

struct ExperimentSplit {
  ExperimentName name = ExperimentName::kUnfiltered;
  std::vector<DomainRecord> train;
  std::vector<DomainRecord> test;
  std::uint64_t seed = 0;
};

/// Cellular, confidence >= 10, and rating < 40 or >= 60.
bool in_filtered_set(const DomainRecord& r);

/// Throws Error naming the shortfall when there are not enough records.
ExperimentSplit build_experiment(std::span<const DomainRecord> records, ExperimentName name, std::uint64_t seed,
                                 const ExperimentOptions& options = {});

struct ModelSpec {
  std::string id;
  features::FeatureSets enabled;
};

/// M1 basic, M2 chars, M3 tld, M4 loglik, M5 words, M6 all but words, M7 all.
const std::vector<ModelSpec>& standard_models();
ModelSpec find_model(std::string_view id);

struct TrainOptions {
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t lambda_count = 100;
  double lambda_ratio = 0.01;
  std::size_t min_word_count = 1;
  lasso::FitOptions fit;
};

struct TrainedModel {
  features::FeatureSpace space;
  lasso::LassoModel model;      ///< one-standard-error lambda
  lasso::LassoModel min_model;  ///< lambda with the best cross-validated AUC
  lasso::CvResult cv;
};

/// Fits the feature space, cross-validates the lambda path, and refits on
/// all of `train` at the selected lambdas.
TrainedModel train(std::span<const DomainRecord> train, features::FeatureSets enabled, const Resources& res,
                   const TrainOptions& options);

/// Same, on records already described with every family in `enabled`.
TrainedModel train(std::span<const features::DomainFeatures> train, std::span<const int> labels,
                   features::FeatureSets enabled, const TrainOptions& options);

struct MatrixRow {
  std::string id;
  std::string feature_sets;
  double mcr = 0.0;
  double auc = 0.0;
  std::size_t features = 0;
  std::size_t nonzero = 0;
  double lambda = 0.0;
  double mcr_min = 0.0;
  double auc_min = 0.0;
  std::size_t nonzero_min = 0;
  double lambda_min = 0.0;
};

struct MatrixReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double train_base_rate = 0.0;
  double test_base_rate = 0.0;
  double threshold = 0.5;
  std::vector<MatrixRow> rows;

  std::string to_text() const;
  std::string to_json() const;
};

struct MatrixRun {
  MatrixReport report;
  std::vector<TrainedModel> models;  ///< parallel to report.rows
};

MatrixRun run_matrix(const ExperimentSplit& split, std::span<const ModelSpec> specs, const Resources& res,
                     const TrainOptions& options, double threshold = 0.5);

struct RankedFeature {
  std::uint32_t column = 0;
  std::string name;
  double coefficient = 0.0;
};

struct CoefficientReport {
  std::vector<RankedFeature> malicious;  ///< positive coefficients, largest first
  std::vector<RankedFeature> benign;     ///< negative coefficients, most negative first
};

/// Throws FingerprintMismatch if the model was not trained on `space`.
CoefficientReport report_coefficients(const lasso::LassoModel& model, const features::FeatureSpace& space,
                                      std::size_t top_n);

/// Scores hostnames with a trained model: suffix reduction, segmentation
/// (only if the model uses words), featurization, logistic link.
class Scorer {
 public:
  Scorer(const Resources& res, features::FeatureSpace space, lasso::LassoModel model);

  double score(std::string_view host) const;
  double score(const DomainRecord& record) const;

  const features::FeatureSpace& space() const noexcept { return space_; }
  const lasso::LassoModel& model() const noexcept { return model_; }

 private:
  const Resources& res_;
  features::FeatureSpace space_;
  lasso::LassoModel model_;
  std::vector<double> dense_;
};

}  // namespace lexdom
