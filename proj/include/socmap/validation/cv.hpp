#pragma once

#include <socmap/ingest/dataset.hpp>
#include <socmap/ingest/model_spec.hpp>
#include <socmap/kriging/theta.hpp>
#include <socmap/validation/compare.hpp>
#include <socmap/validation/metrics.hpp>
#include <socmap/validation/regression_kriging.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace socmap::validation {

struct cv_settings {
  std::size_t repetitions = 200;
  double validation_fraction = 0.1;
  double alpha = 0.05;
  // Rotate through every fold in each repetition instead of one split.
  bool full_rotation = false;
  // 0 = hardware concurrency. Results do not depend on this.
  std::size_t workers = 0;
  std::uint64_t seed = 1;
  spatial_options spatial;
};

void validate(const cv_settings& settings);

struct fold {
  std::vector<std::size_t> learning;
  std::vector<std::size_t> validation;  // sorted
};

// One fold for a single split, round(1 / validation_fraction) folds under full
// rotation. Depends only on (n, settings, repetition).
std::vector<fold> plan_repetition(std::size_t n, const cv_settings& settings, std::size_t repetition);

// Seed of the trend model for a repetition and fold.
std::uint64_t trend_seed(std::uint64_t seed, std::size_t repetition, std::size_t fold);

// Fits a spec on the learning rows only. Validation targets are never read.
fitted_model fit_learning(const ingest::dataset& data, const fold& f, const ingest::model_spec& spec,
                          std::uint64_t seed, const spatial_options& opts);

struct rep_diagnostics {
  std::string failure;  // empty when valid
  std::uint32_t trees = 0;
  bool spatial = false;
  variogram::matern_model model;  // after Winsorizing
  double c = 0.0;
  std::size_t flagged = 0;
  std::size_t donors = 0;
  kriging::theta_stats before;
  kriging::theta_stats after;
};

struct rep_result {
  std::size_t spec = 0;
  std::size_t repetition = 0;
  bool valid = true;
  metric_set metrics;
  std::vector<rep_diagnostics> folds;
  std::vector<std::size_t> rows;      // validation rows, in prediction order
  std::vector<double> predicted;      // kg/m2
};

struct metric_summary {
  double mean = 0.0;
  double ci_lo = 0.0;  // t-based 95% interval of the mean over valid repetitions
  double ci_hi = 0.0;
  std::size_t n = 0;
};

struct cv_report {
  std::vector<std::string> models;
  std::size_t repetitions = 0;
  double iq_y = 0.0;
  double alpha = 0.05;
  std::vector<std::string> site_ids;
  std::vector<location> sites;
  std::vector<double> observed;
  std::vector<rep_result> results;  // spec-major, then repetition
  std::vector<std::array<metric_summary, all_metrics.size()>> summary;
  std::vector<std::size_t> failed;  // invalid repetitions per spec

  const rep_result& at(std::size_t spec, std::size_t repetition) const {
    return results[spec * repetitions + repetition];
  }
  // Metric values of valid repetitions, non-finite values left out.
  std::vector<double> values(std::size_t spec, metric m) const;
};

cv_report run_cv(const ingest::dataset& data, const std::vector<ingest::model_spec>& specs,
                 const cv_settings& settings);

significance_matrix compare_models(const cv_report& report, metric m);

}  // namespace socmap::validation
