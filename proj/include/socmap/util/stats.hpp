#pragma once

#include <span>

namespace socmap {

double mean(std::span<const double> x);

// Unbiased (n - 1) sample variance; zero for fewer than two values.
double sample_variance(std::span<const double> x);

// Sample quantile with linear interpolation between order statistics
// (Hyndman-Fan type 7, the R default).
double quantile(std::span<const double> x, double p);

double median(std::span<const double> x);

double interquartile_range(std::span<const double> x);

}  // namespace socmap
