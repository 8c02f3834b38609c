#include <socmap/validation/metrics.hpp>

#include <socmap/error.hpp>
#include <socmap/util/stats.hpp>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace socmap::validation {

std::string_view to_string(metric m) {
  switch (m) {
    case metric::mpe: return "MPE";
    case metric::rmspe: return "RMSPE";
    case metric::medpe: return "MedPE";
    case metric::rmedspe: return "RMedSPE";
    case metric::r2: return "R2";
    case metric::rpiq: return "RPIQ";
  }
  return "?";
}

metric metric_from_string(std::string_view name) {
  for (auto m : all_metrics)
    if (to_string(m) == name) return m;
  throw config_error("unknown metric '" + std::string(name) + "'");
}

double metric_set::get(metric m) const {
  switch (m) {
    case metric::mpe: return mpe;
    case metric::rmspe: return rmspe;
    case metric::medpe: return medpe;
    case metric::rmedspe: return rmedspe;
    case metric::r2: return r2;
    case metric::rpiq: return rpiq;
  }
  return 0.0;
}

metric_set compute_metrics(std::span<const double> observed, std::span<const double> predicted, double iq_y) {
  if (observed.size() != predicted.size()) throw data_error("observed and predicted lengths differ");
  if (observed.empty()) throw data_error("metrics need at least one prediction");
  if (!(iq_y > 0.0)) throw data_error("interquartile range of the target must be > 0");
  const auto n = observed.size();
  std::vector<double> err(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(observed[i]) || !std::isfinite(predicted[i])) throw data_error("non-finite value in metrics");
    err[i] = predicted[i] - observed[i];
    sq[i] = err[i] * err[i];
  }
  metric_set m;
  m.mpe = mean(err);
  m.rmspe = std::sqrt(mean(sq));
  m.medpe = median(err);
  m.rmedspe = std::sqrt(median(sq));

  const double mo = mean(observed);
  const double mp = mean(predicted);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = observed[i] - mo;
    const double b = predicted[i] - mp;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx > 0.0 && syy > 0.0) {
    m.r2 = std::min(1.0, sxy * sxy / (sxx * syy));
  } else {
    m.r2 = 0.0;
    m.r2_degenerate = true;
  }
  if (m.rmspe > 0.0) {
    m.rpiq = iq_y / m.rmspe;
  } else {
    m.rpiq = std::numeric_limits<double>::infinity();
    m.rpiq_infinite = true;
  }
  return m;
}

}  // namespace socmap::validation
