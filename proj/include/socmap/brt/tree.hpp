#pragma once

#include <socmap/brt/features.hpp>
#include <socmap/brt/split.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace socmap::brt {

struct tree_node {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::vector<branch> category_side;
  int left = -1;
  int right = -1;
  int missing = -1;
  double value = 0.0;        // mean learning residual in the node
  double improvement = 0.0;  // squared-error reduction of this node's split
  std::uint32_t n_obs = 0;   // bagged learning rows that reached the node

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const tree_node&, const tree_node&) = default;
};

// Ternary regression tree; node 0 is the root.
class regression_tree {
 public:
  regression_tree() = default;
  explicit regression_tree(std::vector<tree_node> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> row) const;
  // Index of the leaf `row` lands in.
  int leaf_index(std::span<const double> row) const;

  const std::vector<tree_node>& nodes() const noexcept { return nodes_; }
  int split_count() const;
  double max_abs_leaf() const;

  friend bool operator==(const regression_tree&, const regression_tree&) = default;

 private:
  std::vector<tree_node> nodes_;
};

struct growth_options {
  int max_splits = 12;
  int min_obs_leaf = 3;
};

// Best-first growth: repeatedly splits the terminal node whose best split
// gives the largest error reduction until max_splits is reached or no node
// can be split. Leaves predict the mean residual of their rows; an empty
// missing branch inherits its parent's mean.
regression_tree grow_tree(const feature_matrix& x, std::span<const double> residuals,
                          std::span<const std::size_t> rows, const growth_options& options);

}  // namespace socmap::brt
