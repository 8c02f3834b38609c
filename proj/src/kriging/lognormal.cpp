#include <socmap/kriging/lognormal.hpp>

#include <socmap/error.hpp>

#include <cmath>

namespace socmap::kriging {

namespace {
void check(double brt_z, const kriging_prediction& kp) {
  if (!std::isfinite(brt_z) || !std::isfinite(kp.u_hat) || !std::isfinite(kp.sigma2) || !std::isfinite(kp.psi))
    throw domain_error("non-finite input to the lognormal back-transform");
}
}  // namespace

double predict_lognormal(double brt_z, const kriging_prediction& kp) {
  check(brt_z, kp);
  return std::exp(brt_z + kp.u_hat + 0.5 * kp.sigma2 - kp.psi);
}

double predict_naive(double brt_z, const kriging_prediction& kp) {
  check(brt_z, kp);
  return std::exp(brt_z + kp.u_hat);
}

}  // namespace socmap::kriging
