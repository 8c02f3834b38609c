#pragma once

#include <socmap/brt/boosting.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socmap::brt {

struct importance_score {
  std::string predictor;
  double score = 0.0;
};

// Relative influence: summed squared-error reduction of every split on a
// predictor, scaled to total 100. A model without splits scores all zero.
std::vector<importance_score> variable_importance(const boosted_model& model);

struct partial_dependence_curve {
  std::string covariate;
  bool categorical = false;
  std::vector<double> grid;          // numeric values, or level codes
  std::vector<std::string> labels;   // level names for categorical covariates
  std::vector<double> values;        // mean prediction (log scale) per grid value
};

// For each grid value v: the mean prediction over the rows of `learning`
// with the covariate forced to v. An empty grid means 50 evenly spaced values
// over the observed range (numeric) or every level (categorical).
partial_dependence_curve partial_dependence(const boosted_model& model, const feature_matrix& learning,
                                            std::string_view covariate, std::span<const double> grid = {});

}  // namespace socmap::brt
