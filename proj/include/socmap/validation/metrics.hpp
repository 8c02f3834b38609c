#pragma once

#include <array>
#include <span>
#include <string_view>

namespace socmap::validation {

enum class metric { mpe, rmspe, medpe, rmedspe, r2, rpiq };

inline constexpr std::array<metric, 6> all_metrics = {metric::mpe,     metric::rmspe, metric::medpe,
                                                      metric::rmedspe, metric::r2,    metric::rpiq};

std::string_view to_string(metric m);
metric metric_from_string(std::string_view name);

// Errors are predicted - observed, on the original (kg/m2) scale.
struct metric_set {
  double mpe = 0.0;
  double rmspe = 0.0;
  double medpe = 0.0;
  double rmedspe = 0.0;
  double r2 = 0.0;    // squared Pearson correlation of predicted and observed
  double rpiq = 0.0;  // iq_y / rmspe
  bool r2_degenerate = false;  // a vector had zero variance; r2 reported as 0
  bool rpiq_infinite = false;  // rmspe was zero

  double get(metric m) const;
};

metric_set compute_metrics(std::span<const double> observed, std::span<const double> predicted, double iq_y);

}  // namespace socmap::validation
