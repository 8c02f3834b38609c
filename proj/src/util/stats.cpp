#include <socmap/util/stats.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace socmap {

double mean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double quantile(std::span<const double> x, double p) {
  if (x.empty()) throw std::invalid_argument("quantile of empty sample");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double interquartile_range(std::span<const double> x) {
  return quantile(x, 0.75) - quantile(x, 0.25);
}

}  // namespace socmap
