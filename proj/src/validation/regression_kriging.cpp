#include <socmap/validation/regression_kriging.hpp>

#include <socmap/error.hpp>
#include <socmap/kriging/lognormal.hpp>
#include <socmap/variogram/fit.hpp>

#include <cmath>

namespace socmap::validation {

spatial_component fit_spatial_component(std::span<const location> sites, std::span<const double> residuals,
                                        const spatial_options& opts) {
  const auto& w = opts.winsorize;
  auto collapsed = kriging::collapse_duplicates(sites, residuals);
  spatial_component sc;
  sc.empirical = variogram::compute_empirical(collapsed.sites, collapsed.values, w.estimator, w.bins);
  sc.initial_model = variogram::fit_matern(sc.empirical, w.fit);
  sc.winsorized = kriging::winsorize(collapsed.sites, collapsed.values, sc.initial_model, w);
  sc.donors = std::move(collapsed.sites);
  sc.donor_residuals = std::move(collapsed.values);
  sc.donor_of_site = std::move(collapsed.group);
  return sc;
}

fitted_model fit_model(const ingest::dataset& learning, const ingest::model_spec& spec, std::uint64_t seed,
                       const spatial_options& opts) {
  ingest::validate(spec, learning.schema);
  const auto z = ingest::log_transform(learning);
  auto trend = brt::fit_brt(learning, z, spec, seed);
  return fit_model(learning, spec, std::move(trend), opts);
}

fitted_model fit_model(const ingest::dataset& learning, const ingest::model_spec& spec, brt::boosted_model trend,
                       const spatial_options& opts) {
  fitted_model m;
  m.spec = spec;
  m.trend = std::move(trend);
  if (spec.spatial) {
    const auto z = ingest::log_transform(learning);
    const auto h = brt::predict_brt(m.trend, learning);
    std::vector<double> u(z.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = z[i] - h[i];
    m.spatial = fit_spatial_component(learning.locations(), u, opts);
  }
  return m;
}

std::vector<site_prediction> predict(const fitted_model& model, const ingest::dataset& sites) {
  const auto h = brt::predict_brt(model.trend, sites);
  std::optional<kriging::ordinary_kriging> ok;
  if (model.spatial) ok.emplace(model.spatial->donors, model.spatial->kriged_values(), model.spatial->model());

  std::vector<site_prediction> out(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& r = sites.records[i];
    auto& p = out[i];
    p.site_id = r.site_id;
    p.x_km = r.x_km;
    p.y_km = r.y_km;
    p.brt_z = h[i];
    kriging::kriging_prediction kp;
    if (ok) {
      kp = ok->predict(r.where());
      p.u_hat = kp.u_hat;
      p.sigma2 = kp.sigma2;
      p.psi = kp.psi;
    }
    p.y_hat = kriging::predict_lognormal(h[i], kp);
  }
  return out;
}

}  // namespace socmap::validation
