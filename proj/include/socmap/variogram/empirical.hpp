#pragma once

#include <socmap/geometry.hpp>

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace socmap::variogram {

enum class estimator { matheron, dowd };

std::string_view to_string(estimator e);
estimator estimator_from_string(std::string_view name);

// Bins are half-open (lower, upper].
struct lag_bin {
  double lower_km = 0.0;
  double upper_km = 0.0;
  double mean_distance_km = 0.0;
  std::size_t pair_count = 0;
  double gamma = 0.0;
};

struct empirical_variogram {
  estimator method = estimator::dowd;
  std::vector<lag_bin> bins;
  double max_distance_km = 0.0;  // over all site pairs
};

struct binning {
  int bin_count = 15;
  // Non-positive means half the largest inter-site distance.
  double max_lag_km = 0.0;
};

// Equal-width edges 0 = e_0 < ... < e_count = max_lag.
std::vector<double> bin_edges(double max_lag_km, int bin_count);

// Pairs at zero distance are ignored. Empty bins are dropped.
empirical_variogram compute_empirical(std::span<const location> sites, std::span<const double> values,
                                      estimator method, const binning& opts = {});

// Same, with explicit edges.
empirical_variogram compute_empirical(std::span<const location> sites, std::span<const double> values,
                                      estimator method, std::span<const double> edges);

}  // namespace socmap::variogram
