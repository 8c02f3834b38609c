#pragma once

#include <socmap/brt/features.hpp>
#include <socmap/brt/tree.hpp>
#include <socmap/ingest/model_spec.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace socmap::brt {

struct fit_info {
  std::uint64_t seed = 0;
  ingest::brt_params params;
  std::uint32_t n_learning = 0;
  // Chosen number of trees; equals trees.size().
  std::uint32_t best_iteration = 0;
  // False when the internal CV minimum sat at max_trees.
  bool stopping_reached = true;
  // Mean squared residual on the full learning set after 0..best_iteration trees.
  std::vector<double> train_deviance;
  // Mean held-out deviance across internal CV folds after 0..k trees.
  std::vector<double> cv_deviance;

  friend bool operator==(const fit_info&, const fit_info&) = default;
};

// Stochastic gradient boosted regression trees under squared-error loss:
//   prediction(x) = initial_value + learning_rate * sum_m trees[m](x)
struct boosted_model {
  double initial_value = 0.0;
  double learning_rate = 0.01;
  std::vector<regression_tree> trees;
  std::vector<predictor_info> predictors;
  fit_info info;

  double predict_row(std::span<const double> row) const;

  friend bool operator==(const boosted_model&, const boosted_model&) = default;
};

// Fits on every row of `x` against targets `z`. The number of trees is the
// argmin of mean held-out deviance over internal CV folds; the final model is
// then refitted on all rows. Identical inputs and seed give an identical model.
boosted_model fit_brt(const feature_matrix& x, std::span<const double> z,
                      const ingest::brt_params& params, std::uint64_t seed);

boosted_model fit_brt(const ingest::dataset& data, std::span<const double> z,
                      const ingest::model_spec& spec, std::uint64_t seed);

// `x` must be encoded with the model's predictor list.
std::vector<double> predict_brt(const boosted_model& model, const feature_matrix& x);

std::vector<double> predict_brt(const boosted_model& model, const ingest::dataset& data);

}  // namespace socmap::brt
