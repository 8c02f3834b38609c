#include <doctest.h>

#include <support/oracles.hpp>

#include <socmap/error.hpp>
#include <socmap/kriging/lognormal.hpp>
#include <socmap/kriging/ordinary_kriging.hpp>
#include <socmap/kriging/theta.hpp>
#include <socmap/kriging/winsorize.hpp>
#include <socmap/simulate/simulate.hpp>
#include <socmap/util/random.hpp>
#include <socmap/util/stats.hpp>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace socmap;
using namespace socmap::kriging;
using socmap::variogram::matern_model;

namespace {

const matern_model exponential{0.1, 0.05, 50.0, 0.5};

std::vector<location> random_sites(std::size_t n, double extent, rng_t& rng) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<location> out(n);
  for (auto& s : out) s = {u(rng), u(rng)};
  return out;
}

std::vector<double> field(std::span<const location> sites, const matern_model& m, rng_t& rng) {
  auto u = simulate::sample_grf(sites, m.partial_sill, m.range, m.smoothness, rng);
  for (auto& v : u) v += std::sqrt(m.nugget) * standard_normal(rng);
  return u;
}

}  // namespace

TEST_CASE("three-donor exponential system matches the dense bordered oracle") {
  const std::vector<location> sites = {{0, 0}, {30, 10}, {-20, 40}};
  const std::vector<double> u = {0.2, -0.1, 0.4};
  const location target{5, 15};
  const auto ref = oracle::ordinary_kriging(sites, u, exponential, target);
  const ordinary_kriging ok(sites, u, exponential);
  double psi = 0.0;
  const auto w = ok.weights(target, &psi);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(w[i] - ref.weights[i]) < 1e-10);
  const auto p = ok.predict(target);
  CHECK(std::abs(psi - ref.psi) < 1e-10);
  CHECK(std::abs(p.psi - ref.psi) < 1e-10);
  CHECK(std::abs(p.sigma2 - ref.sigma2) < 1e-10);
  CHECK(std::abs(p.u_hat - ref.u_hat) < 1e-10);
}

TEST_CASE("random donor configurations match the dense oracle") {
  auto rng = make_rng(404);
  std::uniform_int_distribution<std::size_t> count(3, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const matern_model m{0.2 * unit(rng), 0.01 + 0.3 * unit(rng), 5.0 + 100.0 * unit(rng),
                         0.1 + 4.0 * unit(rng)};
    const auto sites = random_sites(count(rng), 100.0, rng);
    std::vector<double> u(sites.size());
    for (auto& v : u) v = standard_normal(rng);
    const location target{100.0 * unit(rng), 100.0 * unit(rng)};
    const auto ref = oracle::ordinary_kriging(sites, u, m, target);
    const ordinary_kriging ok(sites, u, m);
    double psi = 0.0;
    const auto w = ok.weights(target, &psi);
    const auto p = ok.predict(target);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] - ref.weights[i]) < 1e-10);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-10);
    CHECK(std::abs(p.psi - ref.psi) < 1e-10);
    CHECK(std::abs(p.sigma2 - ref.sigma2) < 1e-10);
    CHECK(std::abs(p.u_hat - ref.u_hat) < 1e-10);
    CHECK(p.sigma2 >= 0.0);
  }
}

TEST_CASE("symmetric donors share the weight") {
  for (double kappa : {0.3, 0.5, 2.0, 10.0}) {
    const matern_model m{0.05, 0.2, 30.0, kappa};
    const std::vector<location> sites = {{-10, 0}, {10, 0}};
    const std::vector<double> u = {1.0, 3.0};
    const ordinary_kriging ok(sites, u, m);
    const auto w = ok.weights({0, 7});
    CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ok.predict({0, 7}).u_hat == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("a single effective donor takes all the weight") {
  const std::vector<location> sites = {{3, 4}, {3, 4}};
  const std::vector<double> u = {0.2, 0.6};
  const ordinary_kriging ok(sites, u, exponential);
  REQUIRE(ok.donors().size() == 1);
  CHECK(ok.donor_values()[0] == doctest::Approx(0.4));
  const auto w = ok.weights({10, 10});
  CHECK(w[0] == doctest::Approx(1.0));
  const auto p = ok.predict({10, 10});
  CHECK(p.u_hat == doctest::Approx(0.4));
  const double g = variogram::matern_gamma(exponential, std::hypot(7.0, 6.0));
  CHECK(p.sigma2 == doctest::Approx(2.0 * g).epsilon(1e-12));
}

TEST_CASE("duplicate locations are averaged in first-appearance order") {
  const std::vector<location> sites = {{1, 1}, {2, 2}, {1, 1}, {5, 5}, {2, 2}};
  const std::vector<double> u = {1.0, 2.0, 3.0, 4.0, 6.0};
  const auto c = collapse_duplicates(sites, u);
  REQUIRE(c.sites.size() == 3);
  CHECK(c.sites[0] == location{1, 1});
  CHECK(c.values == std::vector<double>{2.0, 4.0, 4.0});
  CHECK(c.group == std::vector<std::size_t>{0, 1, 0, 2, 1});

  // The collapsed system matches kriging from the averaged donors directly.
  const auto a = krige_point(sites, u, exponential, {3, 0});
  const auto b = krige_point(c.sites, c.values, exponential, {3, 0});
  CHECK(a.u_hat == doctest::Approx(b.u_hat).epsilon(1e-14));
  CHECK(a.sigma2 == doctest::Approx(b.sigma2).epsilon(1e-14));
}

TEST_CASE("zero-nugget kriging is exact at donors and continuous nearby") {
  const matern_model m{0.0, 0.3, 40.0, 0.5};
  auto rng = make_rng(8);
  const auto sites = random_sites(8, 100.0, rng);
  std::vector<double> u(sites.size());
  for (auto& v : u) v = standard_normal(rng);
  const ordinary_kriging ok(sites, u, m);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto at = ok.predict(sites[i]);
    CHECK(at.u_hat == doctest::Approx(u[i]).epsilon(1e-10));
    CHECK(std::abs(at.sigma2) < 1e-10);
    const auto near = ok.predict({sites[i].x_km + 1e-6, sites[i].y_km});
    CHECK(std::abs(near.u_hat - u[i]) < 1e-4);
    CHECK(near.sigma2 < 1e-4);
  }
}

TEST_CASE("pure-nugget kriging predicts the donor mean") {
  const matern_model m{0.2, 0.0, 10.0, 0.5};
  auto rng = make_rng(9);
  const auto sites = random_sites(12, 50.0, rng);
  std::vector<double> u(sites.size());
  for (auto& v : u) v = standard_normal(rng);
  const auto p = krige_point(sites, u, m, {200, 200});
  CHECK(p.u_hat == doctest::Approx(mean(u)).epsilon(1e-12));
  CHECK(p.sigma2 == doctest::Approx(0.2 * (1.0 + 1.0 / 12.0)).epsilon(1e-12));
}

TEST_CASE("fast leave-one-out equals refitting without each site") {
  auto rng = make_rng(10);
  for (const auto& m : {exponential, matern_model{0.02, 0.3, 25.0, 1.7}, matern_model{0.0, 1.0, 60.0, 0.4}}) {
    const auto sites = random_sites(30, 150.0, rng);
    const auto u = field(sites, m, rng);
    const auto fast = leave_one_out(sites, u, m);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      std::vector<location> s;
      std::vector<double> v;
      for (std::size_t j = 0; j < sites.size(); ++j)
        if (j != i) {
          s.push_back(sites[j]);
          v.push_back(u[j]);
        }
      const auto ref = oracle::ordinary_kriging(s, v, m, sites[i]);
      CHECK(fast.prediction[i] == doctest::Approx(ref.u_hat).epsilon(1e-9));
      CHECK(fast.sigma2[i] == doctest::Approx(ref.sigma2).epsilon(1e-9));
      CHECK(fast.error[i] == doctest::Approx(u[i] - ref.u_hat).epsilon(1e-9));
    }
    const loo_operator op(sites, m);
    CHECK(op.size() == sites.size());
    CHECK(op.apply(u).prediction == fast.prediction);
  }
}

TEST_CASE("theta confidence intervals follow chi-square sampling theory") {
  const boost::math::chi_squared chi(1.0);
  CHECK(chi2_1_median() == doctest::Approx(boost::math::quantile(chi, 0.5)).epsilon(1e-12));
  CHECK(chi2_1_median() == doctest::Approx(0.455).epsilon(0.001));
  for (std::size_t n : {10u, 100u, 500u, 3000u}) {
    const auto bar = theta_mean_interval(n);
    CHECK(bar.lo == doctest::Approx(1.0 - 1.96 * std::sqrt(2.0 / n)));
    CHECK(bar.hi == doctest::Approx(1.0 + 1.96 * std::sqrt(2.0 / n)));
    const double k = (static_cast<double>(n) + 1.0) / 2.0;
    const boost::math::beta_distribution<> b(k, k);
    const auto med = theta_median_interval(n);
    CHECK(med.lo == doctest::Approx(boost::math::quantile(chi, boost::math::quantile(b, 0.025))).epsilon(1e-9));
    CHECK(med.hi == doctest::Approx(boost::math::quantile(chi, boost::math::quantile(b, 0.975))).epsilon(1e-9));
    CHECK(med.contains(chi2_1_median()));
  }
}

TEST_CASE("theta statistics scale inversely with the model variance") {
  auto rng = make_rng(12);
  const auto sites = random_sites(60, 200.0, rng);
  const auto u = field(sites, exponential, rng);
  const auto base = loo_theta(sites, u, exponential);
  CHECK(base.theta_bar >= 0.0);
  CHECK(base.theta_med >= 0.0);
  CHECK(base.n == 60);
  for (double s : {2.0, 0.25}) {
    const matern_model scaled{exponential.nugget * s, exponential.partial_sill * s, exponential.range,
                              exponential.smoothness};
    const auto t = loo_theta(sites, u, scaled);
    CHECK(t.theta_bar == doctest::Approx(base.theta_bar / s).epsilon(1e-12));
    CHECK(t.theta_med == doctest::Approx(base.theta_med / s).epsilon(1e-12));
  }
}

TEST_CASE("loo_theta needs ten sites") {
  auto rng = make_rng(1);
  const auto sites = random_sites(9, 10.0, rng);
  const std::vector<double> u(9, 0.0);
  CHECK_THROWS_AS(loo_theta(sites, u, exponential), data_error);
}

TEST_CASE("summarize_theta computes mean and median") {
  const std::vector<double> theta = {0.1, 0.2, 0.4, 2.0, 10.0};
  const auto t = summarize_theta(theta);
  CHECK(t.theta_bar == doctest::Approx(2.54));
  CHECK(t.theta_med == doctest::Approx(0.4));
  CHECK(t.n == 5);
}

TEST_CASE("winsorize leaves valid residuals untouched with zero measurement error") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20 && checked < 3; ++seed) {
    auto rng = make_rng(seed, {3});
    const auto sites = random_sites(150, 200.0, rng);
    const auto u = field(sites, exponential, rng);
    if (!loo_theta(sites, u, exponential).valid()) continue;
    winsorize_options o;
    o.epsilon = 0.0;
    const auto w = winsorize(sites, u, exponential, o);
    CHECK(w.flagged() == 0);
    CHECK(w.u_star == u);
    CHECK_FALSE(w.adjusted);
    ++checked;
  }
  CHECK(checked == 3);
}

TEST_CASE("a gross outlier is flagged and clamped to its bound") {
  auto rng = make_rng(77);
  const auto sites = random_sites(200, 250.0, rng);
  auto u = field(sites, exponential, rng);
  const std::size_t bad = 17;
  u[bad] += 10.0 * std::sqrt(exponential.sill());
  const auto w = winsorize(sites, u, exponential);
  CHECK(w.flags[bad] == outlier_flag::high);
  CHECK(w.u_star[bad] == w.u_plus[bad]);
  CHECK(w.adjusted);
  CHECK(w.after.valid());
  CHECK(std::abs(w.after.theta_bar - 1.0) <= 1e-3);
  CHECK(w.c >= 1.5);
  CHECK(w.c <= 4.0);
  CHECK(w.u == u);

  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(w.u_minus[i] <= w.u_plus[i]);
    switch (w.flags[i]) {
      case outlier_flag::none: CHECK(w.u_star[i] == u[i]); break;
      case outlier_flag::low:
        CHECK(w.u_star[i] == w.u_minus[i]);
        CHECK(u[i] < w.u_minus[i]);
        break;
      case outlier_flag::high:
        CHECK(w.u_star[i] == w.u_plus[i]);
        CHECK(u[i] > w.u_plus[i]);
        break;
    }
  }
}

TEST_CASE("several large outliers are all flagged") {
  auto rng = make_rng(78);
  const auto sites = random_sites(200, 250.0, rng);
  auto u = field(sites, exponential, rng);
  for (std::size_t i = 0; i < 6; ++i) u[i * 30] += (i % 2 ? 6.0 : -6.0) * std::sqrt(exponential.sill());
  winsorize_options o;
  o.epsilon = 0.0;
  const auto w = winsorize(sites, u, exponential, o);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(w.flags[i * 30] == (i % 2 ? outlier_flag::high : outlier_flag::low));
}

TEST_CASE("lognormal back-transform") {
  CHECK(predict_lognormal(1.0, {0.0, 0.2, 0.05}) == doctest::Approx(std::exp(1.05)).epsilon(1e-15));
  CHECK(predict_lognormal(0.7, {0.0, 0.0, 0.0}) == doctest::Approx(std::exp(0.7)).epsilon(1e-15));
  CHECK(predict_naive(1.0, {0.3, 0.2, 0.05}) == doctest::Approx(std::exp(1.3)).epsilon(1e-15));
  CHECK(predict_lognormal(-3.0, {-1.0, 0.4, 0.1}) > 0.0);
  CHECK_THROWS_AS(predict_lognormal(std::nan(""), {}), domain_error);
  CHECK_THROWS_AS(predict_lognormal(1.0, {0.0, INFINITY, 0.0}), domain_error);
}
