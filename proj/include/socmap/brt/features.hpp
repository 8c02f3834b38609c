#pragma once

#include <socmap/ingest/dataset.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace socmap::brt {

struct predictor_info {
  std::string name;
  ingest::covariate_kind kind = ingest::covariate_kind::numeric;
  std::vector<std::string> levels;

  friend bool operator==(const predictor_info&, const predictor_info&) = default;
};

// Row-major design matrix over a fixed predictor list. Categorical cells hold
// level codes into predictor_info::levels; NaN marks a missing cell.
class feature_matrix {
 public:
  feature_matrix() = default;
  feature_matrix(std::vector<predictor_info> predictors, std::size_t rows);

  // Selects `predictors` (by name) from the dataset schema.
  static feature_matrix from_dataset(const ingest::dataset& data,
                                     std::span<const std::string> predictors);

  // Encodes `data` against an existing predictor list, matching columns and
  // categorical levels by name. Levels the predictor does not know become NaN.
  static feature_matrix encode(const ingest::dataset& data,
                               std::span<const predictor_info> predictors);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return predictors_.size(); }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }

  const std::vector<predictor_info>& predictors() const noexcept { return predictors_; }
  bool is_categorical(std::size_t col) const {
    return predictors_[col].kind == ingest::covariate_kind::categorical;
  }
  std::size_t level_count(std::size_t col) const { return predictors_[col].levels.size(); }

 private:
  std::vector<predictor_info> predictors_;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

}  // namespace socmap::brt
