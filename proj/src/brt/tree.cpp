#include <socmap/brt/tree.hpp>

#include <algorithm>
#include <cmath>

namespace socmap::brt {

int regression_tree::leaf_index(std::span<const double> row) const {
  int k = 0;
  while (!nodes_[k].is_leaf()) {
    const auto& n = nodes_[k];
    switch (route(n.threshold, n.category_side, row[static_cast<std::size_t>(n.feature)])) {
      case branch::left: k = n.left; break;
      case branch::right: k = n.right; break;
      case branch::missing: k = n.missing; break;
    }
  }
  return k;
}

double regression_tree::predict(std::span<const double> row) const {
  if (nodes_.empty()) return 0.0;
  return nodes_[leaf_index(row)].value;
}

int regression_tree::split_count() const {
  return static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(),
                                        [](const tree_node& n) { return !n.is_leaf(); }));
}

double regression_tree::max_abs_leaf() const {
  double m = 0.0;
  for (const auto& n : nodes_)
    if (n.is_leaf()) m = std::max(m, std::abs(n.value));
  return m;
}

namespace {

struct pending {
  std::vector<std::size_t> rows;
  std::optional<split_rule> split;
};

double mean_of(std::span<const double> residuals, const std::vector<std::size_t>& rows) {
  double s = 0.0;
  for (auto i : rows) s += residuals[i];
  return s / static_cast<double>(rows.size());
}

}  // namespace

regression_tree grow_tree(const feature_matrix& x, std::span<const double> residuals,
                          std::span<const std::size_t> rows, const growth_options& options) {
  std::vector<tree_node> nodes;
  std::vector<pending> work;  // parallel to nodes; only terminal nodes hold rows

  auto add_node = [&](std::vector<std::size_t> node_rows, double fallback) {
    tree_node n;
    n.n_obs = static_cast<std::uint32_t>(node_rows.size());
    n.value = node_rows.empty() ? fallback : mean_of(residuals, node_rows);
    auto split = node_rows.empty() ? std::optional<split_rule>()
                                   : find_best_split(x, residuals, node_rows, options.min_obs_leaf);
    nodes.push_back(std::move(n));
    work.push_back(pending{std::move(node_rows), std::move(split)});
    return static_cast<int>(nodes.size() - 1);
  };

  if (rows.empty()) return regression_tree({tree_node{}});
  add_node({rows.begin(), rows.end()}, 0.0);

  for (int s = 0; s < options.max_splits; ++s) {
    int chosen = -1;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (!nodes[k].is_leaf() || !work[k].split) continue;
      if (chosen < 0 || work[k].split->improvement > work[chosen].split->improvement)
        chosen = static_cast<int>(k);
    }
    if (chosen < 0) break;

    split_rule rule = std::move(*work[chosen].split);
    std::vector<std::size_t> node_rows = std::move(work[chosen].rows);
    work[chosen] = pending{};

    std::vector<std::size_t> left, right, missing;
    for (auto i : node_rows) {
      switch (route(rule, x(i, rule.feature))) {
        case branch::left: left.push_back(i); break;
        case branch::right: right.push_back(i); break;
        case branch::missing: missing.push_back(i); break;
      }
    }
    const double parent_value = nodes[chosen].value;
    const int l = add_node(std::move(left), parent_value);
    const int r = add_node(std::move(right), parent_value);
    const int m = add_node(std::move(missing), parent_value);

    auto& n = nodes[chosen];
    n.feature = static_cast<int>(rule.feature);
    n.threshold = rule.threshold;
    n.category_side = std::move(rule.category_side);
    n.improvement = rule.improvement;
    n.left = l;
    n.right = r;
    n.missing = m;
  }
  return regression_tree(std::move(nodes));
}

}  // namespace socmap::brt
