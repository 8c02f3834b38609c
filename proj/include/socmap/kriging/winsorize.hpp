#pragma once

#include <socmap/geometry.hpp>
#include <socmap/kriging/theta.hpp>
#include <socmap/variogram/empirical.hpp>
#include <socmap/variogram/fit.hpp>
#include <socmap/variogram/matern.hpp>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace socmap::kriging {

inline constexpr double default_measurement_error = 0.112;

enum class outlier_flag : std::uint8_t { none = 0, low = 1, high = 2 };

std::string_view to_string(outlier_flag f);

struct winsorize_options {
  double epsilon = default_measurement_error;  // relative measurement error of the target
  double c_min = 1.5;
  double c_max = 4.0;
  int max_iterations = 20;
  double tolerance = 1e-3;  // on |theta_bar_w - 1|
  // Re-estimate the variogram from the adjusted residuals at the start of
  // every outer iteration after the first. A refit under which theta_bar
  // stays above 1 even at c_min is dropped and the previous model kept.
  bool refit_variogram = true;
  variogram::estimator estimator = variogram::estimator::dowd;
  variogram::binning bins;
  variogram::fit_options fit;
};

struct winsorize_result {
  std::vector<double> u;  // input residuals
  std::vector<double> u_minus;
  std::vector<double> u_plus;
  std::vector<double> u_star;
  std::vector<outlier_flag> flags;
  double c = 0.0;
  int iterations = 0;
  bool adjusted = false;  // false when the raw residuals were already valid
  theta_stats before;
  theta_stats after;
  variogram::matern_model model;  // model the final statistics refer to

  std::size_t flagged() const;
};

// Hawkins-style Winsorizing of kriging residuals. A residual u is moved to its
// nearer bound of u_hat_{-i} +/- c sigma_{-i} only when it lies outside the
// interval even after allowing a relative measurement error epsilon on the
// original scale (u + ln(1 + eps) < U-, or u + ln(1 - eps) > U+). The constant
// c is found by bisection so that the Winsorized theta_bar is 1.
// Throws validity_error when no c in [c_min, c_max] gives a valid model.
winsorize_result winsorize(std::span<const location> sites, std::span<const double> residuals,
                           const variogram::matern_model& model, const winsorize_options& opts = {});

}  // namespace socmap::kriging
