#include <socmap/simulate/simulate.hpp>

#include <socmap/error.hpp>
#include <socmap/util/csv.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <ostream>
#include <random>

namespace socmap::simulate {

std::size_t site_layout::size() const {
  return kind == layout_kind::grid ? static_cast<std::size_t>(std::max(nx, 0)) * static_cast<std::size_t>(std::max(ny, 0))
                                   : count;
}

double site_layout::extent_x() const { return kind == layout_kind::grid ? spacing_km * std::max(nx - 1, 1) : width_km; }
double site_layout::extent_y() const { return kind == layout_kind::grid ? spacing_km * std::max(ny - 1, 1) : height_km; }

void validate(const sim_spec& spec) {
  const auto& l = spec.layout;
  if (l.kind == layout_kind::grid) {
    if (!(l.spacing_km > 0.0) || l.nx < 1 || l.ny < 1) throw config_error("grid layout needs spacing > 0 and nx, ny >= 1");
  } else if (l.count < 1 || !(l.width_km > 0.0) || !(l.height_km > 0.0)) {
    throw config_error("random layout needs count >= 1 and a positive box");
  }
  if (l.size() < 2) throw config_error("simulation needs at least two sites");
  if (l.size() > max_sites) throw config_error(fmt::format("simulation is limited to {} sites", max_sites));
  variogram::validate(spec.residual);
  if (!(spec.contam.fraction >= 0.0 && spec.contam.fraction <= 0.2))
    throw config_error("contamination fraction must lie in [0, 0.2]");
  if (!(spec.contam.magnitude > 0.0)) throw config_error("contamination magnitude must be > 0");
  std::vector<std::string> names;
  for (const auto& c : spec.covariates) {
    if (c.name.empty()) throw config_error("simulated covariate needs a name");
    if (std::find(names.begin(), names.end(), c.name) != names.end())
      throw config_error("duplicate simulated covariate '" + c.name + "'");
    names.push_back(c.name);
    if (!(c.missing_fraction >= 0.0 && c.missing_fraction < 1.0))
      throw config_error("missing fraction of '" + c.name + "' must lie in [0, 1)");
    const bool categorical = c.generator == generator_kind::blocks;
    if (categorical != (c.effect.kind == effect_kind::levels))
      throw config_error("covariate '" + c.name + "': level effects go with the blocks generator only");
    if (categorical) {
      if (c.level_count < 1 || !(c.block_km > 0.0)) throw config_error("blocks need level_count >= 1 and block_km > 0");
      if (c.effect.level_effects.size() != static_cast<std::size_t>(c.level_count))
        throw config_error("covariate '" + c.name + "' needs one level effect per level");
    }
    if (c.generator == generator_kind::field)
      variogram::validate({0.0, 1.0, c.range_km, c.smoothness});
    if (c.effect.kind == effect_kind::sine && !(c.effect.period > 0.0))
      throw config_error("sine period must be > 0");
    if (!(c.noise_sd >= 0.0)) throw config_error("noise_sd must be >= 0");
  }
}

std::vector<location> make_layout(const site_layout& layout, rng_t& rng) {
  std::vector<location> out;
  out.reserve(layout.size());
  if (layout.kind == layout_kind::grid) {
    for (int j = 0; j < layout.ny; ++j)
      for (int i = 0; i < layout.nx; ++i) out.push_back({i * layout.spacing_km, j * layout.spacing_km});
  } else {
    std::uniform_real_distribution<double> ux(0.0, layout.width_km), uy(0.0, layout.height_km);
    for (std::size_t k = 0; k < layout.count; ++k) {
      const double x = ux(rng);
      const double y = uy(rng);
      out.push_back({x, y});
    }
  }
  return out;
}

std::vector<double> sample_grf(std::span<const location> sites, double partial_sill, double range, double smoothness,
                               rng_t& rng) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  if (sites.size() > max_sites) throw config_error(fmt::format("field simulation is limited to {} sites", max_sites));
  std::vector<double> out(sites.size(), 0.0);
  if (partial_sill == 0.0 || n == 0) return out;
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = partial_sill * (1.0 + 1e-10);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = partial_sill * variogram::matern_correlation(
                                          distance(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]),
                                          range, smoothness);
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() != Eigen::Success) throw numeric_error("simulation covariance is not positive definite after jitter");
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = standard_normal(rng);
  const Eigen::VectorXd f = llt.matrixL() * e;
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f(i);
  return out;
}

namespace {

double effect_of(const covariate_effect& e, double v) {
  switch (e.kind) {
    case effect_kind::linear: return e.coefficient * v;
    case effect_kind::step: return v < e.threshold ? e.low : e.high;
    case effect_kind::sine: return e.amplitude * std::sin(2.0 * std::numbers::pi * v / e.period);
    case effect_kind::levels: return e.level_effects.at(static_cast<std::size_t>(v));
  }
  return 0.0;
}

std::vector<double> generate(const sim_covariate& c, const site_layout& layout, std::span<const location> sites,
                             rng_t& rng) {
  std::vector<double> v(sites.size());
  switch (c.generator) {
    case generator_kind::uniform: {
      std::uniform_real_distribution<double> u(c.lo, c.hi);
      for (auto& x : v) x = u(rng);
      break;
    }
    case generator_kind::gradient_x:
    case generator_kind::gradient_y: {
      const bool along_x = c.generator == generator_kind::gradient_x;
      const double extent = along_x ? layout.extent_x() : layout.extent_y();
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const double pos = along_x ? sites[i].x_km : sites[i].y_km;
        v[i] = c.lo + (c.hi - c.lo) * pos / extent;
        if (c.noise_sd > 0.0) v[i] += c.noise_sd * standard_normal(rng);
      }
      break;
    }
    case generator_kind::field: {
      v = sample_grf(sites, 1.0, c.range_km, c.smoothness, rng);
      for (auto& x : v) x += c.lo;
      break;
    }
    case generator_kind::blocks: {
      const auto bx = static_cast<std::size_t>(std::floor(layout.extent_x() / c.block_km)) + 1;
      const auto by = static_cast<std::size_t>(std::floor(layout.extent_y() / c.block_km)) + 1;
      std::uniform_int_distribution<int> pick(0, c.level_count - 1);
      std::vector<int> block_level(bx * by);
      for (auto& b : block_level) b = pick(rng);
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const auto ix = std::min(bx - 1, static_cast<std::size_t>(std::max(0.0, sites[i].x_km / c.block_km)));
        const auto iy = std::min(by - 1, static_cast<std::size_t>(std::max(0.0, sites[i].y_km / c.block_km)));
        v[i] = block_level[iy * bx + ix];
      }
      break;
    }
  }
  return v;
}

}  // namespace

sim_output simulate_field(const sim_spec& spec) {
  validate(spec);
  auto layout_rng = make_rng(spec.seed, {10});
  const auto sites = make_layout(spec.layout, layout_rng);
  const auto n = sites.size();

  std::vector<ingest::covariate_def> defs;
  for (const auto& c : spec.covariates) {
    ingest::covariate_def d;
    d.name = c.name;
    if (c.generator == generator_kind::blocks) {
      d.kind = ingest::covariate_kind::categorical;
      for (int l = 0; l < c.level_count; ++l) d.levels.push_back(fmt::format("L{}", l));
    }
    defs.push_back(std::move(d));
  }

  sim_output out;
  out.data.schema = ingest::covariate_schema(std::move(defs));
  out.truth.assign(n, {});
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < spec.covariates.size(); ++j) {
    const auto& c = spec.covariates[j];
    auto rng = make_rng(spec.seed, {20, j});
    auto values = generate(c, spec.layout, sites, rng);
    for (std::size_t i = 0; i < n; ++i) out.truth[i].trend += effect_of(c.effect, values[i]);
    if (c.missing_fraction > 0.0) {
      auto mrng = make_rng(spec.seed, {50, j});
      const auto k = static_cast<std::size_t>(std::llround(c.missing_fraction * static_cast<double>(n)));
      for (auto i : sample_without_replacement(n, k, mrng)) values[i] = ingest::missing_value;
    }
    columns.push_back(std::move(values));
  }

  auto grf_rng = make_rng(spec.seed, {30});
  const auto grf = sample_grf(sites, spec.residual.partial_sill, spec.residual.range, spec.residual.smoothness, grf_rng);
  auto nugget_rng = make_rng(spec.seed, {31});
  const double nugget_sd = std::sqrt(spec.residual.nugget);

  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& t = out.truth[i];
    t.trend += spec.intercept;
    t.grf = grf[i];
    t.nugget = nugget_sd * standard_normal(nugget_rng);
    const double z = t.trend + t.grf + t.nugget;
    target[i] = spec.lognormal ? std::exp(z) : z;
  }

  auto contam_rng = make_rng(spec.seed, {40});
  const auto n_bad = static_cast<std::size_t>(std::llround(spec.contam.fraction * static_cast<double>(n)));
  for (auto i : sample_without_replacement(n, n_bad, contam_rng)) {
    target[i] *= spec.contam.magnitude;
    out.truth[i].contaminated = true;
  }

  const int width = static_cast<int>(fmt::format("{}", n).size());
  out.data.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = out.data.records[i];
    r.site_id = fmt::format("S{:0{}}", i + 1, width);
    r.x_km = sites[i].x_km;
    r.y_km = sites[i].y_km;
    if (!(target[i] > 0.0) || !std::isfinite(target[i]))
      throw validation_error(fmt::format("simulated target at {} is not positive; use lognormal or raise the intercept",
                                         r.site_id));
    r.target = target[i];
    r.covariates.resize(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) r.covariates[j] = columns[j][i];
  }
  return out;
}

void write_truth(std::ostream& out, const sim_output& sim) {
  out << "site_id,trend,grf,nugget,contaminated\n";
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    const auto& t = sim.truth[i];
    out << csv::escape(sim.data.records[i].site_id) << ',' << csv::format_exact(t.trend) << ','
        << csv::format_exact(t.grf) << ',' << csv::format_exact(t.nugget) << ',' << (t.contaminated ? 1 : 0) << '\n';
  }
}

}  // namespace socmap::simulate
