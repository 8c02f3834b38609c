#include <socmap/variogram/empirical.hpp>

#include <socmap/error.hpp>
#include <socmap/util/stats.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace socmap::variogram {

namespace {
// Dowd's constant: 2.198 median(|d|)^2 estimates 2 gamma for Gaussian increments.
constexpr double dowd_constant = 2.198;
}

std::string_view to_string(estimator e) { return e == estimator::dowd ? "dowd" : "matheron"; }

estimator estimator_from_string(std::string_view name) {
  if (name == "dowd") return estimator::dowd;
  if (name == "matheron") return estimator::matheron;
  throw config_error("unknown variogram estimator '" + std::string(name) + "'");
}

std::vector<double> bin_edges(double max_lag_km, int bin_count) {
  if (bin_count < 1) throw config_error("bin count must be >= 1");
  if (!(max_lag_km > 0.0) || !std::isfinite(max_lag_km)) throw config_error("max lag must be finite and > 0");
  std::vector<double> edges(static_cast<std::size_t>(bin_count) + 1);
  for (int k = 0; k <= bin_count; ++k) edges[static_cast<std::size_t>(k)] = max_lag_km * k / bin_count;
  edges.back() = max_lag_km;
  return edges;
}

empirical_variogram compute_empirical(std::span<const location> sites, std::span<const double> values,
                                      estimator method, const binning& opts) {
  if (sites.size() != values.size()) throw data_error("site and value counts differ");
  double max_d = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t j = i + 1; j < sites.size(); ++j) max_d = std::max(max_d, distance(sites[i], sites[j]));
  if (sites.size() < 2) throw degenerate_error("variogram needs at least two sites");
  if (max_d == 0.0) throw degenerate_error("all sites are co-located");
  const double max_lag = opts.max_lag_km > 0.0 ? opts.max_lag_km : 0.5 * max_d;
  const auto edges = bin_edges(max_lag, opts.bin_count);
  return compute_empirical(sites, values, method, edges);
}

empirical_variogram compute_empirical(std::span<const location> sites, std::span<const double> values,
                                      estimator method, std::span<const double> edges) {
  if (sites.size() != values.size()) throw data_error("site and value counts differ");
  if (sites.size() < 2) throw degenerate_error("variogram needs at least two sites");
  if (edges.size() < 2) throw config_error("need at least one lag bin");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw config_error("bin edges must increase");
  for (double v : values)
    if (!std::isfinite(v)) throw data_error("non-finite residual");

  const std::size_t nb = edges.size() - 1;
  std::vector<std::vector<double>> diffs(nb);
  std::vector<double> dist_sum(nb, 0.0);
  double max_d = 0.0;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      const double d = distance(sites[i], sites[j]);
      max_d = std::max(max_d, d);
      if (d == 0.0 || d <= edges.front() || d > edges.back()) continue;
      // First edge >= d; bin index is one less.
      const auto it = std::lower_bound(edges.begin() + 1, edges.end(), d);
      const auto b = static_cast<std::size_t>(it - edges.begin()) - 1;
      diffs[b].push_back(values[i] - values[j]);
      dist_sum[b] += d;
    }
  }
  if (max_d == 0.0) throw degenerate_error("all sites are co-located");

  empirical_variogram out;
  out.method = method;
  out.max_distance_km = max_d;
  for (std::size_t b = 0; b < nb; ++b) {
    auto& d = diffs[b];
    if (d.empty()) continue;
    lag_bin bin;
    bin.lower_km = edges[b];
    bin.upper_km = edges[b + 1];
    bin.pair_count = d.size();
    bin.mean_distance_km = dist_sum[b] / static_cast<double>(d.size());
    if (method == estimator::matheron) {
      double s = 0.0;
      for (double v : d) s += v * v;
      bin.gamma = s / (2.0 * static_cast<double>(d.size()));
    } else {
      for (double& v : d) v = std::abs(v);
      const double med = median(d);
      bin.gamma = dowd_constant * med * med / 2.0;
    }
    out.bins.push_back(bin);
  }
  return out;
}

}  // namespace socmap::variogram
