#include <socmap/kriging/theta.hpp>

#include <socmap/error.hpp>
#include <socmap/kriging/ordinary_kriging.hpp>
#include <socmap/util/stats.hpp>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <vector>

namespace socmap::kriging {

double chi2_1_median() {
  static const double m = boost::math::median(boost::math::chi_squared(1.0));
  return m;
}

interval theta_mean_interval(std::size_t n) {
  if (n == 0) throw data_error("theta interval needs n >= 1");
  const double half = 1.96 * std::sqrt(2.0 / static_cast<double>(n));
  return {1.0 - half, 1.0 + half};
}

interval theta_median_interval(std::size_t n) {
  if (n == 0) throw data_error("theta interval needs n >= 1");
  const double a = (static_cast<double>(n) + 1.0) / 2.0;
  const boost::math::beta_distribution<> order(a, a);
  const boost::math::chi_squared chi(1.0);
  return {boost::math::quantile(chi, boost::math::quantile(order, 0.025)),
          boost::math::quantile(chi, boost::math::quantile(order, 0.975))};
}

theta_stats summarize_theta(std::span<const double> theta) {
  if (theta.empty()) throw data_error("no theta values");
  theta_stats s;
  s.n = theta.size();
  s.theta_bar = mean(theta);
  s.theta_med = median(theta);
  s.ci_bar = theta_mean_interval(s.n);
  s.ci_med = theta_median_interval(s.n);
  return s;
}

theta_stats loo_theta(std::span<const location> sites, std::span<const double> residuals,
                      const variogram::matern_model& model) {
  if (sites.size() < 10) throw data_error("theta validation needs at least 10 sites");
  const auto loo = leave_one_out(sites, residuals, model);
  std::vector<double> theta(sites.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(loo.sigma2[i] > 0.0)) throw degenerate_error("zero leave-one-out kriging variance");
    theta[i] = loo.error[i] * loo.error[i] / loo.sigma2[i];
  }
  return summarize_theta(theta);
}

}  // namespace socmap::kriging
