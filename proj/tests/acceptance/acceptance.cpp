// Acceptance suite. Usage: acceptance <id>, id in 1..9. Prints detail lines
// and ends with one "PASS criterion N: ..." or "FAIL criterion N: ..." line.

#include <support/oracles.hpp>

#include <socmap/brt/boosting.hpp>
#include <socmap/brt/split.hpp>
#include <socmap/error.hpp>
#include <socmap/ingest/stock.hpp>
#include <socmap/kriging/lognormal.hpp>
#include <socmap/kriging/ordinary_kriging.hpp>
#include <socmap/kriging/theta.hpp>
#include <socmap/simulate/simulate.hpp>
#include <socmap/util/random.hpp>
#include <socmap/util/stats.hpp>
#include <socmap/validation/cv.hpp>
#include <socmap/validation/metrics.hpp>
#include <socmap/validation/regression_kriging.hpp>
#include <socmap/validation/report_io.hpp>
#include <socmap/variogram/empirical.hpp>
#include <socmap/variogram/fit.hpp>
#include <socmap/variogram/matern.hpp>

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace socmap;
namespace fs = std::filesystem;
using variogram::matern_model;

namespace {

struct verdict {
  bool pass = true;

  void check(bool ok, const std::string& what) {
    fmt::print("  [{}] {}\n", ok ? "ok" : "FAIL", what);
    pass = pass && ok;
  }
};

class stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double standard_error(std::span<const double> x) {
  return std::sqrt(sample_variance(x) / static_cast<double>(x.size()));
}

std::vector<location> grid(int nx, int ny, double spacing) {
  std::vector<location> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out.push_back({i * spacing, j * spacing});
  return out;
}

std::vector<location> random_sites(std::size_t n, double extent, rng_t& rng) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<location> out(n);
  for (auto& s : out) s = {u(rng), u(rng)};
  return out;
}

// GRF plus independent nugget noise.
std::vector<double> field(std::span<const location> sites, const matern_model& m, rng_t& rng) {
  auto u = simulate::sample_grf(sites, m.partial_sill, m.range, m.smoothness, rng);
  for (auto& v : u) v += std::sqrt(m.nugget) * standard_normal(rng);
  return u;
}

// ---------------------------------------------------------------------------

ingest::horizon_record hz(double top, double bottom, double bd, double soc, double rf) {
  return {"s", top, bottom, bd, soc, rf};
}

bool criterion_stock() {
  verdict v;
  stopwatch clock;
  using ingest::compute_stock;

  const std::vector<ingest::horizon_record> one = {hz(0, 30, 1.0, 1.0, 0.0)};
  const double a = compute_stock(one, 30);
  v.check(std::abs(a - 3.0) <= 1e-10, fmt::format("single horizon: {:.12g} (expect 3)", a));

  // 20 cm of the first horizon and 10 cm of the second count.
  const double expect = 0.20 * 1200.0 * 0.02 * 0.9 + 0.10 * 1400.0 * 0.01 * 0.8;
  const std::vector<ingest::horizon_record> two = {hz(0, 20, 1.2, 2.0, 0.1), hz(20, 40, 1.4, 1.0, 0.2)};
  const double b = compute_stock(two, 30);
  v.check(std::abs(b - expect) <= 1e-10 && std::abs(expect - 5.44) <= 1e-10,
          fmt::format("two horizons: {:.12g} (expect {:.12g})", b, expect));

  const std::vector<ingest::horizon_record> zero = {hz(0, 10, 1.3, 0.0, 0.2), hz(10, 35, 1.1, 0.0, 0.0)};
  v.check(compute_stock(zero, 30) == 0.0, "all-zero carbon gives 0");

  auto rng = make_rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int invariant = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const double depth = 10.0 + 50.0 * u(rng);
    const double bottom = depth + 30.0 * u(rng);
    std::vector<ingest::horizon_record> h;
    for (double top = 0.0; top < bottom;) {
      const double next = std::min(bottom, top + 3.0 + 25.0 * u(rng));
      h.push_back(hz(top, next, 0.8 + 0.8 * u(rng), 5.0 * u(rng), 0.5 * u(rng)));
      top = next;
    }
    const double base = compute_stock(h, depth);
    // Split every horizon at a random interior point and shuffle the order.
    std::vector<ingest::horizon_record> fine;
    for (const auto& r : h) {
      const double cut = r.top_cm + (r.bottom_cm - r.top_cm) * (0.05 + 0.9 * u(rng));
      auto lo = r, hi = r;
      lo.bottom_cm = cut;
      hi.top_cm = cut;
      fine.push_back(lo);
      fine.push_back(hi);
    }
    std::shuffle(fine.begin(), fine.end(), rng);
    const double err = std::abs(compute_stock(fine, depth) - base);
    worst = std::max(worst, err);
    invariant += err <= 1e-10;
  }
  v.check(invariant == 100, fmt::format("refinement invariance on {}/100 sets, worst |diff| {:.3g}", invariant, worst));

  const double t = clock.seconds();
  v.check(t < 1.0, fmt::format("runtime {:.3f} s < 1 s", t));
  return v.pass;
}

// ---------------------------------------------------------------------------

bool criterion_kriging() {
  verdict v;
  stopwatch clock;
  auto rng = make_rng(2002);
  std::uniform_int_distribution<std::size_t> count(3, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_w = 0.0, worst_psi = 0.0, worst_s2 = 0.0, worst_sum = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const matern_model m{0.2 * unit(rng), 0.01 + 0.3 * unit(rng), 5.0 + 100.0 * unit(rng), 0.1 + 4.0 * unit(rng)};
    const auto sites = random_sites(count(rng), 100.0, rng);
    std::vector<double> u(sites.size());
    for (auto& x : u) x = standard_normal(rng);
    const location target{100.0 * unit(rng), 100.0 * unit(rng)};
    const auto ref = oracle::ordinary_kriging(sites, u, m, target);
    const kriging::ordinary_kriging ok(sites, u, m);
    double psi = 0.0;
    const auto w = ok.weights(target, &psi);
    const auto p = ok.predict(target);
    for (std::size_t i = 0; i < w.size(); ++i) worst_w = std::max(worst_w, std::abs(w[i] - ref.weights[i]));
    worst_psi = std::max({worst_psi, std::abs(psi - ref.psi), std::abs(p.psi - ref.psi)});
    worst_s2 = std::max(worst_s2, std::abs(p.sigma2 - ref.sigma2));
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0));
  }
  v.check(worst_w <= 1e-10, fmt::format("weights: worst |diff| {:.3g}", worst_w));
  v.check(worst_psi <= 1e-10, fmt::format("psi: worst |diff| {:.3g}", worst_psi));
  v.check(worst_s2 <= 1e-10, fmt::format("sigma2: worst |diff| {:.3g}", worst_s2));
  v.check(worst_sum <= 1e-10, fmt::format("weights sum to 1: worst |sum - 1| {:.3g}", worst_sum));

  double worst_exact = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const matern_model m{0.0, 0.05 + unit(rng), 10.0 + 80.0 * unit(rng), 0.2 + 3.0 * unit(rng)};
    const auto sites = random_sites(count(rng), 100.0, rng);
    std::vector<double> u(sites.size());
    for (auto& x : u) x = standard_normal(rng);
    const kriging::ordinary_kriging ok(sites, u, m);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const auto p = ok.predict(sites[i]);
      worst_exact = std::max({worst_exact, std::abs(p.u_hat - u[i]), std::abs(p.sigma2)});
    }
  }
  v.check(worst_exact <= 1e-10, fmt::format("zero nugget is exact at donors: worst {:.3g}", worst_exact));

  const double t = clock.seconds();
  v.check(t < 10.0, fmt::format("runtime {:.3f} s < 10 s", t));
  return v.pass;
}

// ---------------------------------------------------------------------------

bool criterion_theta() {
  verdict v;
  stopwatch clock;
  const matern_model truth{0.1, 0.05, 50.0, 0.5};
  const auto sites = grid(25, 20, 16.0);
  const kriging::loo_operator loo(sites, truth);
  const int reps = 200;
  int bar_in = 0, med_in = 0, both_in = 0;
  std::vector<double> bars, meds;
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = make_rng(3003, {static_cast<std::uint64_t>(rep)});
    const auto u = field(sites, truth, rng);
    const auto r = loo.apply(u);
    std::vector<double> theta(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) theta[i] = r.error[i] * r.error[i] / r.sigma2[i];
    const auto s = kriging::summarize_theta(theta);
    const bool b = s.theta_bar >= 0.87 && s.theta_bar <= 1.13;
    const bool m = s.theta_med >= 0.39 && s.theta_med <= 0.52;
    bar_in += b;
    med_in += m;
    both_in += b && m;
    bars.push_back(s.theta_bar);
    meds.push_back(s.theta_med);
  }
  // Same statistics through the public entry point on one replicate.
  {
    auto rng = make_rng(3003, {0});
    const auto u = field(sites, truth, rng);
    const auto s = kriging::loo_theta(sites, u, truth);
    v.check(std::abs(s.theta_bar - bars[0]) <= 1e-12 && std::abs(s.theta_med - meds[0]) <= 1e-12,
            "loo_theta agrees with the reusable operator");
  }
  fmt::print("  mean theta_bar {:.4f} (sd {:.4f}), mean theta_med {:.4f} (sd {:.4f})\n", mean(bars),
             std::sqrt(sample_variance(bars)), mean(meds), std::sqrt(sample_variance(meds)));
  fmt::print("  theta_bar in [0.87, 1.13]: {}/{}; theta_med in [0.39, 0.52]: {}/{}; both: {}/{}\n", bar_in, reps,
             med_in, reps, both_in, reps);
  v.check(both_in >= 0.95 * reps, fmt::format("both statistics in band in {:.1f}% >= 95% of replicates",
                                              100.0 * both_in / reps));
  const double t = clock.seconds();
  v.check(t < 600.0, fmt::format("runtime {:.1f} s < 600 s", t));
  return v.pass;
}

// ---------------------------------------------------------------------------

bool criterion_winsorize() {
  verdict v;
  stopwatch clock;
  const int reps = 50;
  std::size_t injected = 0, injected_hit = 0, clean = 0, clean_hit = 0;
  int theta_ok = 0, c_ok = 0, failures = 0;
  std::vector<double> cs;
  for (int rep = 0; rep < reps; ++rep) {
    simulate::sim_spec spec;
    spec.layout.nx = 20;
    spec.layout.ny = 20;
    spec.layout.spacing_km = 16.0;
    spec.intercept = 1.5;
    spec.residual = {0.1, 0.05, 50.0, 0.5};
    spec.contam = {0.02, 10.0};
    spec.seed = 4000 + static_cast<std::uint64_t>(rep);
    const auto sim = simulate::simulate_field(spec);
    const auto sites = sim.data.locations();
    std::vector<double> u;
    for (const auto& r : sim.data.records) u.push_back(std::log(*r.target) - spec.intercept);
    try {
      const auto comp = validation::fit_spatial_component(sites, u, {});
      const auto& w = comp.winsorized;
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const bool flagged = w.flags[comp.donor_of_site[i]] != kriging::outlier_flag::none;
        if (sim.truth[i].contaminated) {
          ++injected;
          injected_hit += flagged;
        } else {
          ++clean;
          clean_hit += flagged;
        }
      }
      theta_ok += std::abs(w.after.theta_bar - 1.0) <= 0.01;
      c_ok += w.c >= 1.5 && w.c <= 4.0;
      cs.push_back(w.c);
    } catch (const validity_error& e) {
      ++failures;
      fmt::print("  replicate {}: {}\n", rep, e.what());
    }
  }
  const double inj_rate = injected ? static_cast<double>(injected_hit) / injected : 0.0;
  const double clean_rate = clean ? static_cast<double>(clean_hit) / clean : 1.0;
  v.check(failures == 0, fmt::format("{} replicates without a valid model", failures));
  v.check(inj_rate >= 0.80, fmt::format("injected sites flagged: {}/{} = {:.1f}% >= 80%", injected_hit, injected,
                                        100.0 * inj_rate));
  v.check(clean_rate <= 0.01, fmt::format("clean sites flagged: {}/{} = {:.2f}% <= 1%", clean_hit, clean,
                                          100.0 * clean_rate));
  v.check(theta_ok == reps, fmt::format("|theta_bar_w - 1| <= 0.01 in {}/{} replicates", theta_ok, reps));
  v.check(c_ok == reps, fmt::format("c in [1.5, 4] in {}/{} replicates", c_ok, reps));
  if (!cs.empty())
    fmt::print("  c: mean {:.3f}, range [{:.3f}, {:.3f}]\n", mean(cs), *std::min_element(cs.begin(), cs.end()),
               *std::max_element(cs.begin(), cs.end()));
  fmt::print("  runtime {:.1f} s\n", clock.seconds());
  return v.pass;
}

// ---------------------------------------------------------------------------

bool criterion_lognormal() {
  verdict v;
  stopwatch clock;
  const matern_model truth{0.112, 0.059, 95.99, 0.40};
  const double h = 1.6;  // known trend on the log scale
  const std::size_t n = 1000, n_val = 100;
  const int reps = 100;
  std::vector<double> mpe_eq4, mpe_naive, medpe_eq4;
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = make_rng(5005, {static_cast<std::uint64_t>(rep)});
    const auto sites = random_sites(n, 320.0, rng);
    const auto u = field(sites, truth, rng);
    const auto order = random_permutation(n, rng);
    std::vector<location> donors, targets;
    std::vector<double> donor_u, observed;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = order[k];
      if (k < n_val) {
        targets.push_back(sites[i]);
        observed.push_back(std::exp(h + u[i]));
      } else {
        donors.push_back(sites[i]);
        donor_u.push_back(u[i]);
      }
    }
    const kriging::ordinary_kriging ok(donors, donor_u, truth);
    std::vector<double> eq4, naive;
    for (const auto& t : targets) {
      const auto p = ok.predict(t);
      eq4.push_back(kriging::predict_lognormal(h, p));
      naive.push_back(kriging::predict_naive(h, p));
    }
    const auto a = validation::compute_metrics(observed, eq4, 1.0);
    const auto b = validation::compute_metrics(observed, naive, 1.0);
    mpe_eq4.push_back(a.mpe);
    medpe_eq4.push_back(a.medpe);
    mpe_naive.push_back(b.mpe);
  }
  const double m4 = mean(mpe_eq4), se4 = standard_error(mpe_eq4);
  const double mn = mean(mpe_naive), sen = standard_error(mpe_naive);
  const double md = mean(medpe_eq4);
  v.check(std::abs(m4) <= 2.0 * se4, fmt::format("lognormal back-transform MPE {:.4f}, 2 SE = {:.4f}", m4, 2.0 * se4));
  v.check(mn < -2.0 * sen, fmt::format("naive back-transform MPE {:.4f} < -2 SE = {:.4f}", mn, -2.0 * sen));
  v.check(md > 0.0, fmt::format("lognormal back-transform mean MedPE {:.4f} > 0", md));
  fmt::print("  runtime {:.1f} s\n", clock.seconds());
  return v.pass;
}

// ---------------------------------------------------------------------------

brt::predictor_info numeric(std::string name) { return {std::move(name), ingest::covariate_kind::numeric, {}}; }

bool criterion_brt() {
  verdict v;
  stopwatch clock;
  using brt::feature_matrix;

  auto additive = [](std::size_t n, rng_t& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::pair<feature_matrix, std::vector<double>> d{feature_matrix({numeric("x1"), numeric("x2")}, n),
                                                     std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      d.first(i, 0) = u(rng);
      d.first(i, 1) = u(rng);
      d.second[i] = std::sin(2.0 * std::numbers::pi * d.first(i, 0)) + 2.0 * d.first(i, 1) * d.first(i, 1);
    }
    return d;
  };

  ingest::brt_params params;
  params.learning_rate = 0.05;
  params.max_trees = 2000;
  params.patience = 200;

  // Deviance along every fit, noisy and noiseless.
  int fits = 0, monotone = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto rng = make_rng(6006, {seed});
    auto [x, z] = additive(200 + 50 * seed, rng);
    if (seed % 2) {
      for (auto& t : z) t += 0.3 * standard_normal(rng);
      for (std::size_t i = 0; i < z.size(); i += 11) x(i, 1) = std::nan("");
    }
    const auto m = brt::fit_brt(x, z, params, seed);
    const auto& dev = m.info.train_deviance;
    bool ok = dev.size() == m.trees.size() + 1;
    for (std::size_t k = 1; k < dev.size(); ++k) ok = ok && dev[k] <= dev[k - 1] * (1.0 + 1e-12);
    ++fits;
    monotone += ok;
  }
  v.check(monotone == fits, fmt::format("training deviance nonincreasing on {}/{} fits", monotone, fits));

  // Numeric split against brute force over all admissible partitions.
  int numeric_ok = 0;
  const int numeric_trials = 100;
  for (int trial = 0; trial < numeric_trials; ++trial) {
    auto rng = make_rng(6007, {static_cast<std::uint64_t>(trial)});
    std::uniform_int_distribution<std::size_t> size(8, 50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = size(rng);
    feature_matrix x({numeric("a"), numeric("b"), numeric("c")}, n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      x(i, 0) = std::round(10.0 * u(rng));
      x(i, 1) = u(rng) < 0.2 ? std::nan("") : u(rng);
      x(i, 2) = u(rng);
      r[i] = x(i, 2) + (x(i, 0) > 5 ? 1.0 : 0.0) + 0.5 * standard_normal(rng);
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto best = brt::find_best_split(x, r, rows, 3);
    const double ref = oracle::best_partition_sse(x, r, rows, 3);
    numeric_ok += best && std::abs(oracle::rule_sse(x, r, rows, *best) - ref) <= 1e-10 * std::max(1.0, ref);
  }
  v.check(numeric_ok == numeric_trials,
          fmt::format("numeric split optimal on {}/{} nodes of 8-50 rows", numeric_ok, numeric_trials));

  // Categorical ordered scan against all 2^L level assignments.
  int cat_ok = 0;
  const int cat_trials = 100;
  for (int trial = 0; trial < cat_trials; ++trial) {
    auto rng = make_rng(6008, {static_cast<std::uint64_t>(trial)});
    const std::size_t levels = 2 + static_cast<std::size_t>(trial % 7);
    std::uniform_int_distribution<std::size_t> size(levels + 2, 50);
    std::uniform_int_distribution<std::size_t> level(0, levels - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = size(rng);
    std::vector<double> effect(levels);
    for (auto& e : effect) e = 2.0 * standard_normal(rng);
    brt::predictor_info p{"c", ingest::covariate_kind::categorical, {}};
    for (std::size_t l = 0; l < levels; ++l) p.levels.push_back("L" + std::to_string(l));
    feature_matrix x({p}, n);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = level(rng);
      x(i, 0) = u(rng) < 0.1 ? std::nan("") : static_cast<double>(l);
      r[i] = effect[l] + standard_normal(rng);
    }
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const double ref = oracle::best_partition_sse(x, r, rows, 1);
    const auto best = brt::find_best_split(x, r, rows, 1);
    if (!std::isfinite(ref))
      cat_ok += !best.has_value();
    else
      cat_ok += best && std::abs(oracle::rule_sse(x, r, rows, *best) - ref) <= 1e-10 * std::max(1.0, ref);
  }
  v.check(cat_ok == cat_trials,
          fmt::format("categorical scan equals exhaustive search on {}/{} nodes (2-8 levels)", cat_ok, cat_trials));

  // Noiseless additive function, held-out R².
  auto rng = make_rng(6009);
  auto [learn_x, learn_z] = additive(2000, rng);
  auto [test_x, test_z] = additive(500, rng);
  const auto m = brt::fit_brt(learn_x, learn_z, params, 11);
  const auto pred = brt::predict_brt(m, test_x);
  const double mu = mean(test_z);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < test_z.size(); ++i) {
    ss_res += (test_z[i] - pred[i]) * (test_z[i] - pred[i]);
    ss_tot += (test_z[i] - mu) * (test_z[i] - mu);
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  v.check(r2 >= 0.95, fmt::format("additive function held-out R2 {:.4f} >= 0.95 ({} trees)", r2, m.trees.size()));
  fmt::print("  runtime {:.1f} s\n", clock.seconds());
  return v.pass;
}

// ---------------------------------------------------------------------------

bool criterion_variography() {
  verdict v;
  stopwatch clock;
  using namespace variogram;

  // Noise-free points on the model curve.
  {
    const matern_model truth{0.1, 0.05, 50.0, 0.5};
    empirical_variogram ev;
    ev.method = estimator::matheron;
    ev.max_distance_km = 400.0;
    for (int k = 0; k < 15; ++k) {
      const double mid = (k + 0.5) * 200.0 / 15.0;
      ev.bins.push_back({k * 200.0 / 15.0, (k + 1) * 200.0 / 15.0, mid, 100, matern_gamma(truth, mid)});
    }
    const auto m = fit_matern(ev);
    auto rel = [](double a, double b) { return std::abs(a - b) / b; };
    const double worst = std::max({rel(m.nugget, truth.nugget), rel(m.partial_sill, truth.partial_sill),
                                   rel(m.range, truth.range), rel(m.smoothness, truth.smoothness)});
    v.check(worst <= 0.01, fmt::format("noise-free fit ({:.4g}, {:.4g}, {:.4g}, {:.4g}), worst relative error {:.2e}",
                                       m.nugget, m.partial_sill, m.range, m.smoothness, worst));
  }

  // Single realizations with kappa held at its true value.
  {
    const matern_model truth{0.05, 0.2, 60.0, 0.5};
    const auto sites = grid(40, 25, 16.0);
    fit_options fo;
    fo.fixed_smoothness = truth.smoothness;
    const int reps = 50;
    int within = 0;
    for (int rep = 0; rep < reps; ++rep) {
      auto rng = make_rng(7007, {static_cast<std::uint64_t>(rep)});
      const auto u = field(sites, truth, rng);
      const auto m = fit_matern(compute_empirical(sites, u, estimator::matheron), fo);
      const bool ok = std::abs(m.nugget - truth.nugget) <= 0.25 * truth.nugget &&
                      std::abs(m.partial_sill - truth.partial_sill) <= 0.25 * truth.partial_sill &&
                      std::abs(m.range - truth.range) <= 0.25 * truth.range;
      within += ok;
      if (!ok) fmt::print("  replicate {}: ({:.4f}, {:.4f}, {:.2f})\n", rep, m.nugget, m.partial_sill, m.range);
    }
    v.check(within >= 0.9 * reps,
            fmt::format("GRF recovery within 25% in {}/{} replicates (>= 90%)", within, reps));
  }

  // Dowd against Matheron with 5% gross errors.
  {
    const auto sites = grid(25, 25, 8.0);
    const matern_model truth{0.1, 0.05, 50.0, 0.5};
    const auto edges = bin_edges(100.0, 10);
    int closer = 0, total = 0;
    for (int rep = 0; rep < 100; ++rep) {
      auto rng = make_rng(7008, {static_cast<std::uint64_t>(rep)});
      auto u = field(sites, truth, rng);
      for (auto i : sample_without_replacement(sites.size(), sites.size() / 20, rng)) u[i] += std::log(10.0);
      const auto d = compute_empirical(sites, u, estimator::dowd, edges);
      const auto m = compute_empirical(sites, u, estimator::matheron, edges);
      for (std::size_t k = 0; k < d.bins.size() && k < m.bins.size(); ++k) {
        const double g = matern_gamma(truth, d.bins[k].mean_distance_km);
        closer += std::abs(d.bins[k].gamma - g) < std::abs(m.bins[k].gamma - g);
        ++total;
      }
    }
    v.check(closer >= 0.9 * total, fmt::format("Dowd closer than Matheron in {}/{} bins = {:.1f}% (>= 90%)", closer,
                                               total, 100.0 * closer / total));
  }

  // Spatial dependence of the three published parameter rows.
  {
    struct row {
      const char* name;
      matern_model m;
      double target;
    };
    const row rows[] = {{"LU_g", {0.112, 0.059, 95.99, 0.40}, 0.34},
                        {"L_g", {0.086, 0.010, 11.99, 10.0}, 0.10},
                        {"F_g", {0.082, 0.005, 16.18, 10.0}, 0.057}};
    for (const auto& r : rows) {
      const double sd = spatial_dependence(r.m);
      v.check(std::abs(sd - r.target) <= 0.005,
              fmt::format("spatial dependence {} = {:.4f} (target {} +/- 0.005)", r.name, sd, r.target));
    }
  }
  fmt::print("  runtime {:.1f} s\n", clock.seconds());
  return v.pass;
}

// ---------------------------------------------------------------------------

ingest::model_spec harness_spec(const std::string& name, bool spatial) {
  ingest::model_spec m;
  m.name = name;
  m.predictors = {"v"};
  m.spatial = spatial;
  m.brt.learning_rate = 0.05;
  m.brt.max_trees = 1000;
  m.brt.patience = 200;
  return m;
}

simulate::sim_spec harness_field(bool trend_absorbs, std::uint64_t seed) {
  simulate::sim_spec s;
  s.layout.nx = 20;
  s.layout.ny = 20;
  s.layout.spacing_km = 16.0;
  s.intercept = 1.5;
  s.seed = seed;
  simulate::sim_covariate c;
  c.name = "v";
  c.effect.kind = simulate::effect_kind::linear;
  if (trend_absorbs) {
    // All spatial structure enters through the covariate.
    c.generator = simulate::generator_kind::field;
    c.range_km = 80.0;
    c.smoothness = 0.5;
    c.effect.coefficient = 0.5;
    s.residual = {0.05, 0.0, 80.0, 0.5};
  } else {
    c.generator = simulate::generator_kind::uniform;
    c.effect.coefficient = 0.3;
    s.residual = {0.05, 0.25, 80.0, 0.5};
  }
  s.covariates = {c};
  return s;
}

validation::cv_report harness_run(const simulate::sim_spec& field_spec, const std::string& a, std::size_t reps,
                                  std::size_t workers) {
  const auto sim = simulate::simulate_field(field_spec);
  validation::cv_settings cs;
  cs.repetitions = reps;
  cs.seed = 8008;
  cs.workers = workers;
  return validation::run_cv(sim.data, {harness_spec(a, false), harness_spec(a + "_g", true)}, cs);
}

bool criterion_harness() {
  verdict v;
  stopwatch clock;
  constexpr std::size_t rmspe = 1, r2 = 4;
  static_assert(validation::all_metrics[rmspe] == validation::metric::rmspe);
  static_assert(validation::all_metrics[r2] == validation::metric::r2);

  for (bool absorbs : {false, true}) {
    const std::string name = absorbs ? "B" : "A";
    const auto report = harness_run(harness_field(absorbs, absorbs ? 82 : 81), name, 100, 0);
    const auto sig = validation::compare_models(report, validation::metric::rmspe);
    const auto& cell = sig.cells[0][1];
    const auto& s0 = report.summary[0];
    const auto& s1 = report.summary[1];
    fmt::print("  {}: RMSPE {:.4f} [{:.4f}, {:.4f}], R2 {:.3f}, valid {}/{}\n", name, s0[rmspe].mean, s0[rmspe].ci_lo,
               s0[rmspe].ci_hi, s0[r2].mean, s0[rmspe].n, report.repetitions);
    fmt::print("  {}_g: RMSPE {:.4f} [{:.4f}, {:.4f}], R2 {:.3f}, valid {}/{}\n", name, s1[rmspe].mean,
               s1[rmspe].ci_lo, s1[rmspe].ci_hi, s1[r2].mean, s1[rmspe].n, report.repetitions);
    fmt::print("  Welch p = {:.3g} at adjusted alpha {:.4f}\n", cell.p, sig.adjusted_alpha);
    if (!absorbs)
      v.check(cell.status == validation::pair_status::significant && s1[rmspe].mean < s0[rmspe].mean,
              "weak trend, strong residual: spatial spec significantly lower RMSPE");
    else
      v.check(cell.status == validation::pair_status::not_significant,
              "trend absorbs the spatial structure: difference not significant");
  }
  const double t = clock.seconds();
  v.check(t < 1800.0, fmt::format("runtime {:.1f} s < 1800 s", t));
  return v.pass;
}

// ---------------------------------------------------------------------------

std::string cv_bytes(const validation::cv_report& report, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string all;
  for (const auto& p : validation::write_cv_report(dir, report)) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    all += p.filename().string() + '\n' + ss.str();
  }
  fs::remove_all(dir);
  return all;
}

bool criterion_determinism() {
  verdict v;
  stopwatch clock;
  const auto field_spec = harness_field(false, 91);
  const fs::path base = fs::temp_directory_path() / "socmap_acceptance_determinism";
  const auto ref = cv_bytes(harness_run(field_spec, "A", 12, 1), base / "w1");
  v.check(!ref.empty(), fmt::format("reference report: {} bytes", ref.size()));
  for (std::size_t workers : {1u, 2u, 4u}) {
    const auto again = cv_bytes(harness_run(field_spec, "A", 12, workers), base / fmt::format("w{}", workers));
    v.check(again == ref, fmt::format("{} worker(s): report byte-identical", workers));
  }
  fs::remove_all(base);
  fmt::print("  runtime {:.1f} s\n", clock.seconds());
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  struct criterion {
    const char* title;
    std::function<bool()> run;
  };
  const criterion criteria[] = {
      {"layer stock examples and refinement invariance", criterion_stock},
      {"kriging system matches the dense oracle", criterion_kriging},
      {"LOO theta calibration under the true model", criterion_theta},
      {"Winsorizing flags injected outliers", criterion_winsorize},
      {"lognormal back-transform unbiasedness", criterion_lognormal},
      {"boosted tree sanity", criterion_brt},
      {"variogram estimation and fitting", criterion_variography},
      {"cross-validation harness separates spatial and aspatial specs", criterion_harness},
      {"cross-validation determinism across worker counts", criterion_determinism},
  };
  const int count = static_cast<int>(std::size(criteria));
  if (argc != 2) {
    fmt::print(stderr, "usage: acceptance <1-{}>\n", count);
    return 2;
  }
  const int id = std::atoi(argv[1]);
  if (id < 1 || id > count) {
    fmt::print(stderr, "unknown criterion {}\n", argv[1]);
    return 2;
  }
  const auto& c = criteria[id - 1];
  fmt::print("criterion {}: {}\n", id, c.title);
  bool pass = false;
  try {
    pass = c.run();
  } catch (const std::exception& e) {
    fmt::print("  unexpected error: {}\n", e.what());
  }
  fmt::print("{} criterion {}: {}\n", pass ? "PASS" : "FAIL", id, c.title);
  return pass ? 0 : 1;
}
