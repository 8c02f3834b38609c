#pragma once

#include <socmap/kriging/ordinary_kriging.hpp>

namespace socmap::kriging {

// exp(H + u_hat + sigma2 / 2 - psi), the mean-unbiased back-transform of a
// trend-plus-kriged-residual prediction on the log scale.
double predict_lognormal(double brt_z, const kriging_prediction& kp);

// exp(H + u_hat). Median-unbiased only; kept for comparison.
double predict_naive(double brt_z, const kriging_prediction& kp);

}  // namespace socmap::kriging
