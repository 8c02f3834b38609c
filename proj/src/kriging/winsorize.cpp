#include <socmap/kriging/winsorize.hpp>

#include <socmap/error.hpp>
#include <socmap/kriging/ordinary_kriging.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <fmt/format.h>

namespace socmap::kriging {

std::string_view to_string(outlier_flag f) {
  switch (f) {
    case outlier_flag::low: return "low";
    case outlier_flag::high: return "high";
    default: return "none";
  }
}

std::size_t winsorize_result::flagged() const {
  return static_cast<std::size_t>(std::count_if(flags.begin(), flags.end(),
                                                [](outlier_flag f) { return f != outlier_flag::none; }));
}

namespace {

struct adjustment {
  std::vector<double> u_minus, u_plus, u_star;
  std::vector<outlier_flag> flags;
};

adjustment apply_bounds(std::span<const double> u, const loo_result& centre, double c, double up_allow,
                        double down_allow) {
  adjustment a;
  const auto n = u.size();
  a.u_minus.resize(n);
  a.u_plus.resize(n);
  a.u_star.assign(u.begin(), u.end());
  a.flags.assign(n, outlier_flag::none);
  for (std::size_t i = 0; i < n; ++i) {
    const double sd = std::sqrt(centre.sigma2[i]);
    a.u_minus[i] = centre.prediction[i] - c * sd;
    a.u_plus[i] = centre.prediction[i] + c * sd;
    if (u[i] + up_allow < a.u_minus[i]) {
      a.flags[i] = outlier_flag::low;
      a.u_star[i] = a.u_minus[i];
    } else if (u[i] + down_allow > a.u_plus[i]) {
      a.flags[i] = outlier_flag::high;
      a.u_star[i] = a.u_plus[i];
    }
  }
  return a;
}

double theta_bar(const loo_operator& op, std::span<const double> values) {
  const auto r = op.apply(values);
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += r.error[i] * r.error[i] / r.sigma2[i];
  return s / static_cast<double>(values.size());
}

theta_stats stats_of(const loo_operator& op, std::span<const double> values) {
  const auto r = op.apply(values);
  std::vector<double> theta(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) theta[i] = r.error[i] * r.error[i] / r.sigma2[i];
  return summarize_theta(theta);
}

}  // namespace

winsorize_result winsorize(std::span<const location> sites, std::span<const double> residuals,
                           const variogram::matern_model& model, const winsorize_options& opts) {
  if (sites.size() != residuals.size()) throw data_error("site and residual counts differ");
  if (sites.size() < 10) throw data_error("Winsorizing needs at least 10 sites");
  if (!(opts.epsilon >= 0.0 && opts.epsilon < 1.0)) throw config_error("measurement error must lie in [0, 1)");
  if (!(opts.c_min > 0.0 && opts.c_min < opts.c_max)) throw config_error("need 0 < c_min < c_max");
  if (opts.max_iterations < 1) throw config_error("Winsorizing needs at least one iteration");

  const double up_allow = std::log1p(opts.epsilon);
  const double down_allow = std::log1p(-opts.epsilon);
  const std::vector<double> u(residuals.begin(), residuals.end());

  winsorize_result out;
  out.u = u;
  out.model = model;
  {
    const loo_operator op(sites, model);
    out.before = stats_of(op, u);
    if (out.before.valid()) {
      auto a = apply_bounds(u, op.apply(u), opts.c_max, up_allow, down_allow);
      out.u_minus = std::move(a.u_minus);
      out.u_plus = std::move(a.u_plus);
      out.u_star = u;
      out.flags.assign(u.size(), outlier_flag::none);
      out.c = opts.c_max;
      out.after = out.before;
      return out;
    }
  }

  out.adjusted = true;
  std::vector<double> current = u;
  std::vector<outlier_flag> previous;
  variogram::matern_model model_t = model;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    out.iterations = iter;
    auto op = std::make_unique<loo_operator>(sites, model_t);
    auto centre = op->apply(current);
    auto excess = [&](double c) {
      const auto a = apply_bounds(u, centre, c, up_allow, down_allow);
      return theta_bar(*op, a.u_star) - 1.0;
    };

    double lo = opts.c_min;
    double hi = opts.c_max;
    double g_lo = 0.0;
    bool have_g_lo = false;
    if (iter > 1 && opts.refit_variogram) {
      // A refit that cannot reach validity even at c_min is discarded.
      const auto ev = variogram::compute_empirical(sites, current, opts.estimator, opts.bins);
      const auto candidate = variogram::fit_matern(ev, opts.fit);
      auto prev_op = std::move(op);
      auto prev_centre = std::move(centre);
      op = std::make_unique<loo_operator>(sites, candidate);
      centre = op->apply(current);
      g_lo = excess(lo);
      if (g_lo > 0.0) {
        op = std::move(prev_op);
        centre = std::move(prev_centre);
      } else {
        model_t = candidate;
        have_g_lo = true;
      }
    }
    if (!have_g_lo) g_lo = excess(lo);
    const double g_hi = excess(hi);
    if (g_lo > 0.0)
      throw validity_error(fmt::format(
          "Winsorizing failed at iteration {}: theta_bar is {:.4f} even with c = {}", iter, g_lo + 1.0, lo));
    double c = hi;
    if (g_hi > 0.0) {
      double glo = g_lo, ghi = g_hi;
      for (int step = 0; step < 100 && hi - lo > 1e-10; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double g = excess(mid);
        if (std::abs(g) <= opts.tolerance * 1e-3) {
          lo = hi = mid;
          glo = ghi = g;
          break;
        }
        if (g > 0.0) {
          hi = mid;
          ghi = g;
        } else {
          lo = mid;
          glo = g;
        }
      }
      c = std::abs(glo) <= std::abs(ghi) ? lo : hi;
    }

    auto a = apply_bounds(u, centre, c, up_allow, down_allow);
    current = a.u_star;
    out.c = c;
    out.u_minus = std::move(a.u_minus);
    out.u_plus = std::move(a.u_plus);
    out.u_star = current;
    const bool stable = a.flags == previous;
    out.flags = a.flags;
    previous = std::move(a.flags);
    out.model = model_t;
    out.after = stats_of(*op, current);
    if (stable) break;
  }

  if (!out.after.valid())
    throw validity_error(fmt::format("Winsorizing failed: after c = {:.4f}, theta_bar = {:.4f}, theta_med = {:.4f}",
                                     out.c, out.after.theta_bar, out.after.theta_med));
  return out;
}

}  // namespace socmap::kriging
