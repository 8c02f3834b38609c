#include <socmap/variogram/bessel.hpp>

#include <socmap/error.hpp>

#include <array>
#include <cmath>
#include <numbers>

namespace socmap::variogram {
namespace {

constexpr double eps = 1e-16;
constexpr int max_terms = 100000;

// Taylor coefficients of 1/Gamma(1 + mu) about mu = 0.
constexpr std::array<double, 26> rgamma_taylor = {
    1.0,
    0.5772156649015328606065,
    -0.655878071520253881077,
    -0.042002635034095235529,
    0.1665386113822914895017,
    -0.04219773455554433674821,
    -0.009621971527876973562115,
    0.007218943246663099542395,
    -0.001165167591859065112114,
    -0.0002152416741149509728157,
    0.0001280502823881161861532,
    -0.00002013485478078823865569,
    -0.000001250493482142670657345,
    0.000001133027231981695882374,
    -0.000000205633841697760710345,
    0.000000006116095104481415817862,
    0.000000005002007644469222930056,
    -0.000000001181274570487020144588,
    0.0000000001043426711691100510492,
    0.00000000000778226343990507125405,
    -0.000000000003696805618642205708188,
    0.0000000000005100370287454475979015,
    -0.00000000000002058326053566506783222,
    -0.00000000000000534812253942301798237,
    0.000000000000001226778628238260790159,
    -0.0000000000000001181259301697458769514,
};

// Temme's auxiliary gamma quantities for |mu| <= 1/2:
//   g1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   g2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
// evaluated from the even/odd parts of the series so g1 has no cancellation.
struct temme_gammas {
  double g1, g2, rgamma_plus, rgamma_minus;
};

temme_gammas gammas(double mu) {
  double even = 0.0;  // sum of c_k mu^k, k even
  double odd = 0.0;   // sum of c_k mu^(k-1), k odd
  double power = 1.0;
  for (std::size_t k = 0; k < rgamma_taylor.size(); ++k) {
    if (k % 2 == 0) {
      even += rgamma_taylor[k] * power;
    } else {
      odd += rgamma_taylor[k] * power;
      power *= mu * mu;
    }
  }
  return {-odd, even, even + mu * odd, even - mu * odd};
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw domain_error("bessel_k needs x > 0");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw domain_error("bessel_k needs a finite order >= 0");

  const int steps = static_cast<int>(nu + 0.5);
  const double mu = nu - steps;  // in [-1/2, 1/2)
  const double mu2 = mu * mu;
  const double two_over_x = 2.0 / x;

  double k_mu = 0.0;
  double k_mu1 = 0.0;

  if (x < 2.0) {
    // Temme's series for K_mu and K_{mu+1}.
    const double half_x = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < eps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(half_x);
    double e = mu * d;
    const double fact2 = std::abs(e) < eps ? 1.0 : std::sinh(e) / e;
    const auto g = gammas(mu);
    double ff = fact * (g.g1 * std::cosh(e) + g.g2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.rgamma_plus;
    double q = 0.5 / (e * g.rgamma_minus);
    double c = 1.0;
    d = half_x * half_x;
    double sum1 = p;
    int i = 1;
    for (; i <= max_terms; ++i) {
      const double di = i;
      ff = (di * ff + p + q) / (di * di - mu2);
      c *= d / di;
      p /= di - mu;
      q /= di + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - di * ff);
      if (std::abs(del) < std::abs(sum) * eps) break;
    }
    if (i > max_terms) throw numeric_error("bessel_k series failed to converge");
    k_mu = sum;
    k_mu1 = sum1 * two_over_x;
  } else {
    // Steed's algorithm for the continued fraction CF2.
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= max_terms; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < eps) break;
    }
    if (i > max_terms) throw numeric_error("bessel_k continued fraction failed to converge");
    h = a1 * h;
    k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  }

  // K_{v+1} = (2v / x) K_v + K_{v-1}, stable upward.
  for (int k = 1; k <= steps; ++k) {
    const double next = (mu + k) * two_over_x * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return k_mu;
}

}  // namespace socmap::variogram
