#include <socmap/variogram/fit.hpp>

#include <socmap/error.hpp>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <mutex>
#include <span>
#include <vector>

namespace socmap::variogram {
namespace {

constexpr double huge = std::numeric_limits<double>::max();

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double logit(double p) {
  p = std::clamp(p, 1e-9, 1.0 - 1e-9);
  return std::log(p / (1.0 - p));
}

// Maps unconstrained coordinates onto the box. Range and smoothness move on
// a log scale.
struct parameter_map {
  double sill_hi = 1.0;
  double log_phi_lo = 0.0, log_phi_hi = 1.0;
  double log_kappa_lo = std::log(min_smoothness), log_kappa_hi = std::log(max_smoothness);
  std::optional<double> fixed_kappa;

  std::size_t dim() const { return fixed_kappa ? 3 : 4; }

  matern_model to_model(const double* t) const {
    matern_model m;
    m.nugget = sill_hi * logistic(t[0]);
    m.partial_sill = sill_hi * logistic(t[1]);
    m.range = std::exp(log_phi_lo + (log_phi_hi - log_phi_lo) * logistic(t[2]));
    m.smoothness = fixed_kappa ? *fixed_kappa
                               : std::exp(log_kappa_lo + (log_kappa_hi - log_kappa_lo) * logistic(t[3]));
    m.range = std::clamp(m.range, std::exp(log_phi_lo), std::exp(log_phi_hi));
    m.smoothness = std::clamp(m.smoothness, min_smoothness, max_smoothness);
    return m;
  }

  std::array<double, 4> to_coords(const matern_model& m) const {
    return {logit(m.nugget / sill_hi), logit(m.partial_sill / sill_hi),
            logit((std::log(m.range) - log_phi_lo) / (log_phi_hi - log_phi_lo)),
            logit((std::log(m.smoothness) - log_kappa_lo) / (log_kappa_hi - log_kappa_lo))};
  }
};

struct problem {
  const empirical_variogram* ev;
  const parameter_map* map;
};

double objective_fn(const gsl_vector* v, void* params) {
  const auto* p = static_cast<const problem*>(params);
  const double* t = gsl_vector_const_ptr(v, 0);
  for (std::size_t k = 0; k < p->map->dim(); ++k)
    if (!std::isfinite(t[k])) return huge;
  const double f = cressie_objective(*p->ev, p->map->to_model(t));
  return std::isfinite(f) ? f : huge;
}

struct run_result {
  std::array<double, 4> coords{};
  double value = huge;
};

run_result run_simplex(const problem& prob, const std::array<double, 4>& start, int max_iter) {
  const std::size_t n = prob.map->dim();
  gsl_multimin_function fn{&objective_fn, n, const_cast<problem*>(&prob)};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* step = gsl_vector_alloc(n);
  for (std::size_t k = 0; k < n; ++k) {
    gsl_vector_set(x, k, start[k]);
    gsl_vector_set(step, k, 1.0);
  }
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
  run_result out;
  if (gsl_multimin_fminimizer_set(s, &fn, x, step) == GSL_SUCCESS) {
    for (int it = 0; it < max_iter; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-10) == GSL_SUCCESS) break;
    }
    out.value = gsl_multimin_fminimizer_minimum(s);
    for (std::size_t k = 0; k < n; ++k) out.coords[k] = gsl_vector_get(gsl_multimin_fminimizer_x(s), k);
  }
  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(step);
  gsl_vector_free(x);
  return out;
}

void quiet_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

}  // namespace

double cressie_objective(const empirical_variogram& ev, const matern_model& model) {
  double s = 0.0;
  for (const auto& b : ev.bins) {
    const double g = matern_gamma(model, b.mean_distance_km);
    if (!(g > 0.0)) return huge;
    const double r = (b.gamma - g) / g;
    s += static_cast<double>(b.pair_count) * r * r;
  }
  return s;
}

matern_fit fit_matern_detailed(const empirical_variogram& ev, const fit_options& opts) {
  quiet_gsl();
  if (ev.bins.size() < 4) throw fit_error(fmt::format("variogram fit needs at least 4 lag bins, got {}", ev.bins.size()));
  if (opts.fixed_smoothness && !(*opts.fixed_smoothness >= min_smoothness && *opts.fixed_smoothness <= max_smoothness))
    throw config_error("fixed smoothness must lie in [0.05, 10]");

  double max_gamma = 0.0;
  double max_lag = 0.0;
  double sum_ng = 0.0, sum_ng2 = 0.0;
  for (const auto& b : ev.bins) {
    max_gamma = std::max(max_gamma, b.gamma);
    max_lag = std::max(max_lag, b.upper_km);
    const double n = static_cast<double>(b.pair_count);
    sum_ng += n * b.gamma;
    sum_ng2 += n * b.gamma * b.gamma;
  }
  if (!(max_gamma > 0.0)) throw fit_error("empirical variogram is zero at every lag");

  parameter_map map;
  map.sill_hi = 2.0 * max_gamma;
  map.log_phi_lo = 0.0;  // 1 km
  map.log_phi_hi = std::log(std::max(2.0 * max_lag, 2.0));
  map.fixed_kappa = opts.fixed_smoothness;
  const problem prob{&ev, &map};

  const std::array<double, 3> sill_fracs = {0.1, 0.4, 0.8};
  const std::array<double, 3> range_fracs = {0.05, 0.2, 0.6};
  const std::array<double, 3> kappas = {0.3, 1.0, 3.0};
  const std::array<double, 1> fixed = {opts.fixed_smoothness.value_or(0.5)};
  const std::span<const double> kappa_grid = opts.fixed_smoothness ? std::span<const double>(fixed)
                                                                   : std::span<const double>(kappas);

  matern_fit out;
  run_result best;
  for (double f0 : sill_fracs)
    for (double f1 : sill_fracs)
      for (double fr : range_fracs)
        for (double k : kappa_grid) {
          matern_model start{f0 * max_gamma, f1 * max_gamma, std::max(1.0, fr * 2.0 * max_lag), k};
          start.range = std::min(start.range, std::exp(map.log_phi_hi));
          const auto r = run_simplex(prob, map.to_coords(start), opts.start_iterations);
          ++out.starts;
          if (r.value < huge) ++out.finite_starts;
          if (r.value < best.value) best = r;
        }
  if (out.finite_starts == 0) throw fit_error("variogram fit failed from every start");

  // Polish with fresh simplices until the optimum stops moving.
  for (int restart = 0; restart < 3; ++restart) {
    const auto r = run_simplex(prob, best.coords, opts.polish_iterations);
    const bool improved = r.value < best.value - 1e-12 * (1.0 + best.value);
    if (r.value < best.value) best = r;
    if (!improved) break;
  }

  out.model = map.to_model(best.coords.data());
  out.objective = best.value;

  matern_model nugget_only{sum_ng2 / sum_ng, 0.0, out.model.range, out.model.smoothness};
  const double nugget_obj = cressie_objective(ev, nugget_only);
  if (nugget_obj <= out.objective * (1.0 + 1e-6) + 1e-12 * static_cast<double>(ev.bins.size())) {
    out.model = nugget_only;
    out.objective = nugget_obj;
    out.pure_nugget = true;
  }
  return out;
}

}  // namespace socmap::variogram
