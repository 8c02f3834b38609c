#pragma once

namespace socmap::variogram {

// Modified Bessel function of the second kind K_nu(x) for real order nu >= 0
// and x > 0. Temme's series for x < 2, Steed's continued fraction above, and
// forward recurrence in the order from |mu| <= 1/2. Relative accuracy is
// about 1e-14 over nu in [0, 10], x in [1e-6, 50].
double bessel_k(double nu, double x);

}  // namespace socmap::variogram
