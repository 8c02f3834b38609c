#include <socmap/brt/interpret.hpp>

#include <socmap/error.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace socmap::brt {

std::vector<importance_score> variable_importance(const boosted_model& model) {
  std::vector<double> raw(model.predictors.size(), 0.0);
  for (const auto& tree : model.trees)
    for (const auto& node : tree.nodes())
      if (!node.is_leaf()) raw[static_cast<std::size_t>(node.feature)] += node.improvement;

  double total = 0.0;
  for (double v : raw) total += v;
  std::vector<importance_score> out;
  for (std::size_t j = 0; j < raw.size(); ++j)
    out.push_back({model.predictors[j].name, total > 0.0 ? 100.0 * raw[j] / total : 0.0});
  return out;
}

partial_dependence_curve partial_dependence(const boosted_model& model, const feature_matrix& learning,
                                            std::string_view covariate, std::span<const double> grid) {
  if (learning.predictors() != model.predictors)
    throw schema_error("learning matrix is not encoded with the model's predictors");
  std::size_t col = model.predictors.size();
  for (std::size_t j = 0; j < model.predictors.size(); ++j)
    if (model.predictors[j].name == covariate) col = j;
  if (col == model.predictors.size())
    throw lookup_error("covariate '" + std::string(covariate) + "' is not used by the model");
  if (learning.rows() == 0) throw data_error("partial dependence needs learning rows");

  partial_dependence_curve curve;
  curve.covariate = std::string(covariate);
  curve.categorical = learning.is_categorical(col);

  if (!grid.empty()) {
    curve.grid.assign(grid.begin(), grid.end());
  } else if (curve.categorical) {
    for (std::size_t l = 0; l < learning.level_count(col); ++l) curve.grid.push_back(static_cast<double>(l));
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < learning.rows(); ++i) {
      const double v = learning(i, col);
      if (std::isnan(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(lo <= hi)) throw data_error("covariate '" + curve.covariate + "' is entirely missing");
    constexpr int points = 50;
    for (int k = 0; k < points; ++k) curve.grid.push_back(lo + (hi - lo) * k / (points - 1));
  }
  if (curve.categorical)
    for (double g : curve.grid) {
      const auto code = static_cast<std::size_t>(g);
      curve.labels.push_back(code < learning.level_count(col) && g >= 0.0 ? model.predictors[col].levels[code]
                                                                       : std::string());
    }

  std::vector<double> row(learning.cols());
  for (double g : curve.grid) {
    double s = 0.0;
    for (std::size_t i = 0; i < learning.rows(); ++i) {
      auto src = learning.row(i);
      std::copy(src.begin(), src.end(), row.begin());
      row[col] = g;
      s += model.predict_row(row);
    }
    curve.values.push_back(s / static_cast<double>(learning.rows()));
  }
  return curve;
}

}  // namespace socmap::brt
