#pragma once

// Versioned JSON model files. A model file embeds its feature space, so a
// loaded model can score hostnames on its own.

#include <string>
#include <string_view>

#include "lexdom/features.hpp"
#include "lexdom/lasso.hpp"

namespace lexdom {

inline constexpr int kModelFormatVersion = 1;

struct SavedModel {
  features::FeatureSpace space;
  lasso::LassoModel model;
};

std::string model_to_json(const lasso::LassoModel& model, const features::FeatureSpace& space);

/// Throws FormatError on malformed or truncated text, unknown versions, or a
/// model whose fingerprint does not match the embedded feature space.
SavedModel model_from_json(std::string_view text);

void save_model(const std::string& path, const lasso::LassoModel& model, const features::FeatureSpace& space);
SavedModel load_model(const std::string& path);

void save_feature_space(const std::string& path, const features::FeatureSpace& space);
features::FeatureSpace load_feature_space(const std::string& path);

}  // namespace lexdom
