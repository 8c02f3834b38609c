#include <socmap/brt/features.hpp>

#include <socmap/error.hpp>

#include <algorithm>

namespace socmap::brt {

feature_matrix::feature_matrix(std::vector<predictor_info> predictors, std::size_t rows)
    : predictors_(std::move(predictors)),
      rows_(rows),
      values_(rows * predictors_.size(), ingest::missing_value) {}

feature_matrix feature_matrix::from_dataset(const ingest::dataset& data,
                                            std::span<const std::string> predictors) {
  std::vector<predictor_info> info;
  for (const auto& name : predictors) {
    auto idx = data.schema.index_of(name);
    if (!idx) throw lookup_error("predictor '" + name + "' is not in the dataset schema");
    const auto& def = data.schema[*idx];
    info.push_back({def.name, def.kind, def.levels});
  }
  return encode(data, info);
}

feature_matrix feature_matrix::encode(const ingest::dataset& data,
                                      std::span<const predictor_info> predictors) {
  feature_matrix m({predictors.begin(), predictors.end()}, data.size());
  for (std::size_t j = 0; j < predictors.size(); ++j) {
    const auto& p = predictors[j];
    auto idx = data.schema.index_of(p.name);
    if (!idx) throw lookup_error("dataset lacks predictor column '" + p.name + "'");
    const auto& def = data.schema[*idx];
    if (def.kind != p.kind) throw schema_error("predictor '" + p.name + "' changed kind");

    // Map dataset level codes onto the predictor's level codes by name.
    std::vector<double> remap;
    if (p.kind == ingest::covariate_kind::categorical) {
      remap.assign(def.levels.size(), ingest::missing_value);
      for (std::size_t l = 0; l < def.levels.size(); ++l) {
        auto it = std::find(p.levels.begin(), p.levels.end(), def.levels[l]);
        if (it != p.levels.end()) remap[l] = static_cast<double>(it - p.levels.begin());
      }
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double v = data.records[i].covariates[*idx];
      if (ingest::is_missing(v)) continue;
      m(i, j) = remap.empty() ? v : remap.at(static_cast<std::size_t>(v));
    }
  }
  return m;
}

}  // namespace socmap::brt
