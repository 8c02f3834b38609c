#include <socmap/variogram/matern.hpp>

#include <socmap/error.hpp>
#include <socmap/variogram/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace socmap::variogram {

void validate(const matern_model& m) {
  if (!(m.nugget >= 0.0) || !std::isfinite(m.nugget)) throw config_error("nugget must be finite and >= 0");
  if (!(m.partial_sill >= 0.0) || !std::isfinite(m.partial_sill))
    throw config_error("partial sill must be finite and >= 0");
  if (!(m.range > 0.0) || !std::isfinite(m.range)) throw config_error("range must be finite and > 0");
  if (!(m.smoothness >= min_smoothness && m.smoothness <= max_smoothness))
    throw config_error("smoothness must lie in [0.05, 10], got " + std::to_string(m.smoothness));
}

double matern_correlation(double h_km, double range, double smoothness) {
  if (h_km < 0.0 || std::isnan(h_km)) throw domain_error("negative lag distance");
  if (h_km == 0.0) return 1.0;
  const double u = h_km / range;
  if (u > 700.0) return 0.0;
  if (smoothness == 0.5) return std::exp(-u);

  const double log_k = std::log(bessel_k(smoothness, u));
  const double log_rho =
      (1.0 - smoothness) * std::numbers::ln2 - std::lgamma(smoothness) + smoothness * std::log(u) + log_k;
  if (std::isnan(log_rho)) return 1.0;
  return std::clamp(std::exp(log_rho), 0.0, 1.0);
}

double matern_gamma(const matern_model& m, double h_km) {
  const double rho = matern_correlation(h_km, m.range, m.smoothness);
  if (h_km == 0.0) return 0.0;
  return m.nugget + m.partial_sill * (1.0 - rho);
}

double matern_covariance(const matern_model& m, double h_km) {
  if (h_km == 0.0) return m.sill();
  return m.partial_sill * matern_correlation(h_km, m.range, m.smoothness);
}

double spatial_dependence(const matern_model& m) {
  const double total = m.sill();
  if (!(total > 0.0)) throw degenerate_error("spatial dependence undefined when nugget and partial sill are both zero");
  return m.partial_sill / total;
}

double effective_range(const matern_model& m, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw config_error("effective range fraction must lie in (0, 1)");
  const double target = 1.0 - fraction;
  double lo = 0.0;
  double hi = m.range;
  while (matern_correlation(hi, m.range, m.smoothness) > target) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (matern_correlation(mid, m.range, m.smoothness) > target)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace socmap::variogram
