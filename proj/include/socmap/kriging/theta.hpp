#pragma once

#include <socmap/geometry.hpp>
#include <socmap/variogram/matern.hpp>

#include <cstddef>
#include <span>

namespace socmap::kriging {

// Median of the chi-square distribution with one degree of freedom.
double chi2_1_median();

struct interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

// 95% interval for the mean of n squared standard normals: 1 +/- 1.96 sqrt(2/n).
interval theta_mean_interval(std::size_t n);

// 95% interval for the sample median of n chi-square(1) draws. The median's
// probability transform is Beta((n+1)/2, (n+1)/2); its quantiles are mapped
// back through the chi-square(1) quantile function.
interval theta_median_interval(std::size_t n);

struct theta_stats {
  double theta_bar = 0.0;
  double theta_med = 0.0;
  std::size_t n = 0;
  interval ci_bar;
  interval ci_med;

  bool mean_valid() const { return ci_bar.contains(theta_bar); }
  bool median_valid() const { return ci_med.contains(theta_med); }
  bool valid() const { return mean_valid() && median_valid(); }
};

theta_stats summarize_theta(std::span<const double> theta);

// theta_i = (u_i - u_hat_{-i})^2 / sigma2_{-i} over all sites. Needs n >= 10.
theta_stats loo_theta(std::span<const location> sites, std::span<const double> residuals,
                      const variogram::matern_model& model);

}  // namespace socmap::kriging
