#pragma once

namespace socmap::variogram {

inline constexpr double min_smoothness = 0.05;
inline constexpr double max_smoothness = 10.0;

// Nugget plus one Matérn structure, in squared log-target units.
struct matern_model {
  double nugget = 0.0;        // c0
  double partial_sill = 0.0;  // c1
  double range = 1.0;         // phi, km
  double smoothness = 0.5;    // kappa

  double sill() const { return nugget + partial_sill; }

  friend bool operator==(const matern_model&, const matern_model&) = default;
};

// Throws config_error when a parameter is outside its admissible range.
void validate(const matern_model& model);

// Matérn correlation rho(h) with rho(0) = 1.
double matern_correlation(double h_km, double range, double smoothness);

// Semivariance; 0 at h = 0, c0 + c1 (1 - rho) beyond.
double matern_gamma(const matern_model& model, double h_km);

// Covariance C(h) = sill - gamma(h). C(0) includes the nugget.
double matern_covariance(const matern_model& model, double h_km);

// c1 / (c0 + c1).
double spatial_dependence(const matern_model& model);

// Smallest h where the semivariance reaches the given fraction of the sill
// (structured part only, so the nugget does not count). Bisection on rho.
double effective_range(const matern_model& model, double fraction = 0.95);

}  // namespace socmap::variogram
