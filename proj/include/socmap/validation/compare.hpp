#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace socmap::validation {

struct welch_result {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
};

// Two-sample t-test without the equal-variance assumption. Needs >= 2 values
// per sample.
welch_result welch_test(std::span<const double> a, std::span<const double> b);

enum class pair_status { significant, not_significant, untestable };

struct pair_test {
  pair_status status = pair_status::untestable;
  double p = 1.0;
};

struct significance_matrix {
  std::vector<std::string> models;
  double alpha = 0.05;
  double adjusted_alpha = 0.05;  // alpha / number of pairs
  std::vector<std::vector<pair_test>> cells;  // symmetric; diagonal untestable
};

// Welch test for every pair, judged at alpha / C(k, 2).
significance_matrix compare_samples(const std::vector<std::string>& models,
                                    const std::vector<std::vector<double>>& samples, double alpha);

}  // namespace socmap::validation
