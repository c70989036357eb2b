#pragma once

#include <string>
#include <string_view>

#include "lexdom/dataset.hpp"

namespace lexdom::testing {

inline std::string data_path(std::string_view name) { return std::string(LEXDOM_DATA_DIR) + "/" + std::string(name); }

inline ResourcePaths bundled_paths() {
  ResourcePaths p;
  p.psl = data_path("public_suffix_list.dat");
  p.unigrams = data_path("unigrams.txt");
  p.bigrams = data_path("bigrams.txt");
  return p;
}

/// Bundled suffix list and corpus, loaded once per test binary.
inline const Resources& resources() {
  static const Resources res = Resources::load(bundled_paths());
  return res;
}

}  // namespace lexdom::testing
