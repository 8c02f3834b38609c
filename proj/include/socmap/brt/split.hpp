#pragma once

#include <socmap/brt/features.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace socmap::brt {

enum class branch : std::uint8_t { missing = 0, left = 1, right = 2 };

// Ternary split. Numeric: value < threshold goes left, otherwise right.
// Categorical: category_side[level] names the branch; levels not seen in the
// node during fitting map to the missing branch. NaN always goes missing.
struct split_rule {
  std::size_t feature = 0;
  double threshold = 0.0;
  std::vector<branch> category_side;
  double improvement = 0.0;  // reduction of within-node squared error
  std::size_t n_left = 0;
  std::size_t n_right = 0;
  std::size_t n_missing = 0;

  bool categorical() const noexcept { return !category_side.empty(); }
};

branch route(const split_rule& rule, double value);
branch route(double threshold, std::span<const branch> category_side, double value);

// Best squared-error split of `rows` (indices into x and residuals). Left and
// right must each hold at least min_obs_leaf rows; the missing branch must be
// empty or hold at least min_obs_leaf rows. Numeric candidates are midpoints
// between consecutive distinct values; categorical candidates are contiguous
// cuts of the present levels ordered by mean residual. Ties go to the lowest
// feature index, then the smallest threshold. Returns nullopt when nothing
// reduces the error.
std::optional<split_rule> find_best_split(const feature_matrix& x,
                                          std::span<const double> residuals,
                                          std::span<const std::size_t> rows, int min_obs_leaf);

}  // namespace socmap::brt
