#include "lexdom/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lexdom/error.hpp"

namespace lexdom {
namespace {

using nlohmann::ordered_json;

constexpr std::string_view kFormatName = "lexdom-model";

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace

std::string model_to_json(const lasso::LassoModel& model, const features::FeatureSpace& space) {
  if (model.feature_fingerprint != space.fingerprint())
    throw FingerprintMismatch("model fingerprint " + model.feature_fingerprint + " does not match feature space " +
                              space.fingerprint());
  ordered_json j;
  j["format"] = kFormatName;
  j["version"] = kModelFormatVersion;
  j["intercept"] = model.intercept;
  j["lambda"] = model.lambda;
  j["seed"] = model.meta.seed;
  j["tol"] = model.meta.tol;
  j["max_iter"] = model.meta.max_iter;
  j["iterations"] = model.meta.iterations;
  j["fingerprint"] = model.feature_fingerprint;
  auto& coefs = j["coefficients"] = ordered_json::array();
  for (const auto& [col, beta] : model.coefficients)
    coefs.push_back({{"column", col}, {"name", space.column_name(col)}, {"value", beta}});
  j["feature_space"] = ordered_json::parse(space.to_json());
  return j.dump(1) + "\n";
}

SavedModel model_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("format", std::string{}) != kFormatName)
      throw FormatError("not a model file");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw FormatError("model format version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    SavedModel out{features::FeatureSpace::from_json(j.at("feature_space").dump()), {}};
    auto& m = out.model;
    m.intercept = j.at("intercept").get<double>();
    m.lambda = j.at("lambda").get<double>();
    m.meta.seed = j.at("seed").get<std::uint64_t>();
    m.meta.tol = j.at("tol").get<double>();
    m.meta.max_iter = j.at("max_iter").get<std::size_t>();
    m.meta.iterations = j.at("iterations").get<std::size_t>();
    m.feature_fingerprint = j.at("fingerprint").get<std::string>();
    if (m.feature_fingerprint != out.space.fingerprint())
      throw FingerprintMismatch("model fingerprint " + m.feature_fingerprint +
                                " does not match its embedded feature space " + out.space.fingerprint());
    for (const auto& c : j.at("coefficients")) {
      const auto col = c.at("column").get<std::uint32_t>();
      if (col >= out.space.column_count()) throw FormatError("coefficient column out of range");
      const double v = c.at("value").get<double>();
      if (v != 0.0) m.coefficients.emplace(col, v);
    }
    return out;
  } catch (const ordered_json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const lasso::LassoModel& model, const features::FeatureSpace& space) {
  write_all(path, model_to_json(model, space));
}

SavedModel load_model(const std::string& path) { return model_from_json(read_all(path)); }

void save_feature_space(const std::string& path, const features::FeatureSpace& space) {
  write_all(path, space.to_json() + "\n");
}

features::FeatureSpace load_feature_space(const std::string& path) {
  return features::FeatureSpace::from_json(read_all(path));
}

}  // namespace lexdom
