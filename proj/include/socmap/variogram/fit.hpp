#pragma once

#include <socmap/variogram/empirical.hpp>
#include <socmap/variogram/matern.hpp>

#include <optional>

namespace socmap::variogram {

struct fit_options {
  // Hold kappa at this value instead of estimating it.
  std::optional<double> fixed_smoothness;
  // Simplex iterations per start, and for the final polish.
  int start_iterations = 400;
  int polish_iterations = 4000;
};

struct matern_fit {
  matern_model model;
  double objective = 0.0;  // weighted SSE at the optimum
  int starts = 0;
  int finite_starts = 0;  // starts that ended on a finite objective
  bool pure_nugget = false;
};

// Cressie-weighted least squares, sum N_h (gamma_hat - gamma)^2 / gamma^2.
double cressie_objective(const empirical_variogram& ev, const matern_model& model);

// Multi-start Nelder-Mead over bound-transformed parameters:
//   c0, c1 in [0, 2 max gamma_hat], phi in [1, 2 max lag] km, kappa in [0.05, 10].
// A pure-nugget model wins whenever it fits as well as the best Matérn.
matern_fit fit_matern_detailed(const empirical_variogram& ev, const fit_options& opts = {});

inline matern_model fit_matern(const empirical_variogram& ev, const fit_options& opts = {}) {
  return fit_matern_detailed(ev, opts).model;
}

}  // namespace socmap::variogram
