#include <socmap/brt/split.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace socmap::brt {
namespace {

struct group {
  double sum = 0.0;
  std::size_t n = 0;

  void add(double r) {
    sum += r;
    ++n;
  }
  double score() const { return n == 0 ? 0.0 : sum * sum / static_cast<double>(n); }
};

}  // namespace

branch route(double threshold, std::span<const branch> category_side, double value) {
  if (std::isnan(value)) return branch::missing;
  if (category_side.empty()) return value < threshold ? branch::left : branch::right;
  if (value < 0.0 || value >= static_cast<double>(category_side.size())) return branch::missing;
  return category_side[static_cast<std::size_t>(value)];
}

branch route(const split_rule& rule, double value) {
  return route(rule.threshold, rule.category_side, value);
}

std::optional<split_rule> find_best_split(const feature_matrix& x,
                                          std::span<const double> residuals,
                                          std::span<const std::size_t> rows, int min_obs_leaf) {
  const auto min_obs = static_cast<std::size_t>(std::max(min_obs_leaf, 1));
  if (rows.size() < 2 * min_obs) return std::nullopt;

  group node;
  double sum_sq = 0.0;
  for (auto i : rows) {
    node.add(residuals[i]);
    sum_sq += residuals[i] * residuals[i];
  }
  const double base = node.score();
  // Improvements below this are rounding noise on a pure node.
  const double floor = 1e-12 * (sum_sq + 1e-300);

  std::optional<split_rule> best;
  double best_gain = floor;

  std::vector<std::pair<double, double>> pairs;  // (value, residual), numeric scan
  pairs.reserve(rows.size());

  for (std::size_t j = 0; j < x.cols(); ++j) {
    group missing;
    if (!x.is_categorical(j)) {
      pairs.clear();
      for (auto i : rows) {
        const double v = x(i, j);
        if (std::isnan(v))
          missing.add(residuals[i]);
        else
          pairs.emplace_back(v, residuals[i]);
      }
      if (missing.n > 0 && missing.n < min_obs) continue;
      if (pairs.size() < 2 * min_obs) continue;
      std::sort(pairs.begin(), pairs.end());

      group left;
      group right;
      for (const auto& p : pairs) right.add(p.second);
      for (std::size_t k = 0; k + 1 < pairs.size(); ++k) {
        left.add(pairs[k].second);
        right.sum -= pairs[k].second;
        --right.n;
        if (left.n < min_obs) continue;
        if (right.n < min_obs) break;
        if (!(pairs[k].first < pairs[k + 1].first)) continue;
        const double gain = left.score() + right.score() + missing.score() - base;
        if (gain > best_gain) {
          double threshold = pairs[k].first + 0.5 * (pairs[k + 1].first - pairs[k].first);
          if (!(threshold > pairs[k].first)) threshold = pairs[k + 1].first;
          best_gain = gain;
          best = split_rule{j, threshold, {}, gain, left.n, right.n, missing.n};
        }
      }
    } else {
      const std::size_t levels = x.level_count(j);
      std::vector<group> by_level(levels);
      for (auto i : rows) {
        const double v = x(i, j);
        if (std::isnan(v) || v < 0.0 || v >= static_cast<double>(levels))
          missing.add(residuals[i]);
        else
          by_level[static_cast<std::size_t>(v)].add(residuals[i]);
      }
      if (missing.n > 0 && missing.n < min_obs) continue;

      std::vector<std::size_t> present;
      for (std::size_t l = 0; l < levels; ++l)
        if (by_level[l].n > 0) present.push_back(l);
      if (present.size() < 2) continue;
      // Order levels by mean response; for squared error the optimal binary
      // partition is a contiguous cut of this ordering.
      std::stable_sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
        return by_level[a].sum / static_cast<double>(by_level[a].n) <
               by_level[b].sum / static_cast<double>(by_level[b].n);
      });

      group left;
      group right;
      for (auto l : present) {
        right.sum += by_level[l].sum;
        right.n += by_level[l].n;
      }
      for (std::size_t k = 0; k + 1 < present.size(); ++k) {
        const auto& g = by_level[present[k]];
        left.sum += g.sum;
        left.n += g.n;
        right.sum -= g.sum;
        right.n -= g.n;
        if (left.n < min_obs || right.n < min_obs) continue;
        const double gain = left.score() + right.score() + missing.score() - base;
        if (gain > best_gain) {
          std::vector<branch> side(levels, branch::missing);
          for (std::size_t q = 0; q < present.size(); ++q)
            side[present[q]] = q <= k ? branch::left : branch::right;
          best_gain = gain;
          best = split_rule{j, 0.0, std::move(side), gain, left.n, right.n, missing.n};
        }
      }
    }
  }
  return best;
}

}  // namespace socmap::brt
