#pragma once

#include <socmap/brt/boosting.hpp>
#include <socmap/ingest/dataset.hpp>
#include <socmap/ingest/model_spec.hpp>
#include <socmap/kriging/ordinary_kriging.hpp>
#include <socmap/kriging/winsorize.hpp>
#include <socmap/variogram/empirical.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace socmap::validation {

// Residual geostatistics settings. The Winsorizing options carry the
// measurement error, the variogram estimator, binning and fit options.
struct spatial_options {
  kriging::winsorize_options winsorize;
};

// Kriging part of a regression-kriging model, fitted to BRT residuals
// u = ln(Y) - H(X) of the learning sites.
struct spatial_component {
  variogram::empirical_variogram empirical;  // of the raw residuals
  variogram::matern_model initial_model;      // fitted to `empirical`
  kriging::winsorize_result winsorized;       // per collapsed donor
  std::vector<location> donors;               // after duplicate collapse
  std::vector<double> donor_residuals;        // before Winsorizing
  std::vector<std::size_t> donor_of_site;     // learning site -> donor

  const variogram::matern_model& model() const { return winsorized.model; }
  std::span<const double> kriged_values() const { return winsorized.u_star; }
};

// Throws validity_error when Winsorizing cannot produce a valid model.
spatial_component fit_spatial_component(std::span<const location> sites, std::span<const double> residuals,
                                        const spatial_options& opts);

struct fitted_model {
  ingest::model_spec spec;
  brt::boosted_model trend;
  std::optional<spatial_component> spatial;  // present for spatial specs
};

// BRT on ln(target) of every record, then the spatial component when the
// spec asks for one.
fitted_model fit_model(const ingest::dataset& learning, const ingest::model_spec& spec, std::uint64_t seed,
                       const spatial_options& opts);

// Same, reusing an already fitted trend (shared between specs that differ only
// in the spatial flag).
fitted_model fit_model(const ingest::dataset& learning, const ingest::model_spec& spec, brt::boosted_model trend,
                       const spatial_options& opts);

struct site_prediction {
  std::string site_id;
  double x_km = 0.0;
  double y_km = 0.0;
  double brt_z = 0.0;
  double u_hat = 0.0;
  double sigma2 = 0.0;
  double psi = 0.0;
  double y_hat = 0.0;  // kg/m2
};

// Aspatial: y_hat = exp(H). Spatial: the lognormal kriging back-transform.
std::vector<site_prediction> predict(const fitted_model& model, const ingest::dataset& sites);

}  // namespace socmap::validation
