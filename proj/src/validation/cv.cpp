#include <socmap/validation/cv.hpp>

#include <socmap/error.hpp>
#include <socmap/util/random.hpp>
#include <socmap/util/stats.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>
#include <utility>

namespace socmap::validation {

void validate(const cv_settings& s) {
  if (s.repetitions < 1) throw config_error("cross-validation needs at least one repetition");
  if (!(s.validation_fraction > 0.0 && s.validation_fraction < 1.0))
    throw config_error("validation fraction must lie in (0, 1)");
  if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw config_error("alpha must lie in (0, 1)");
}

std::vector<fold> plan_repetition(std::size_t n, const cv_settings& settings, std::size_t repetition) {
  auto rng = make_rng(settings.seed, {repetition, 0});
  const auto perm = random_permutation(n, rng);
  std::vector<fold> folds;
  auto make = [&](std::size_t begin, std::size_t end) {
    fold f;
    for (std::size_t i = 0; i < n; ++i) (i >= begin && i < end ? f.validation : f.learning).push_back(perm[i]);
    std::sort(f.validation.begin(), f.validation.end());
    std::sort(f.learning.begin(), f.learning.end());
    if (f.validation.empty() || f.learning.size() < 2) throw config_error("dataset too small for the validation split");
    folds.push_back(std::move(f));
  };
  if (!settings.full_rotation) {
    const auto n_val = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                     std::llround(settings.validation_fraction * static_cast<double>(n))));
    make(0, n_val);
  } else {
    const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(1.0 / settings.validation_fraction)));
    if (k > n) throw config_error("more rotation folds than sites");
    for (std::size_t f = 0; f < k; ++f) make(f * n / k, (f + 1) * n / k);
  }
  return folds;
}

std::uint64_t trend_seed(std::uint64_t seed, std::size_t repetition, std::size_t fold) {
  auto rng = make_rng(seed, {repetition, 1, fold});
  return rng();
}

fitted_model fit_learning(const ingest::dataset& data, const fold& f, const ingest::model_spec& spec,
                          std::uint64_t seed, const spatial_options& opts) {
  return fit_model(data.subset(f.learning), spec, seed, opts);
}

std::vector<double> cv_report::values(std::size_t spec, metric m) const {
  std::vector<double> v;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto& res = at(spec, r);
    if (!res.valid) continue;
    const double x = res.metrics.get(m);
    if (std::isfinite(x)) v.push_back(x);
  }
  return v;
}

namespace {

rep_diagnostics diagnose(const fitted_model& m) {
  rep_diagnostics d;
  d.trees = static_cast<std::uint32_t>(m.trend.trees.size());
  if (m.spatial) {
    const auto& sc = *m.spatial;
    d.spatial = true;
    d.model = sc.model();
    d.c = sc.winsorized.c;
    d.flagged = sc.winsorized.flagged();
    d.donors = sc.donors.size();
    d.before = sc.winsorized.before;
    d.after = sc.winsorized.after;
  }
  return d;
}

std::string trend_key(const ingest::model_spec& s) {
  std::string k;
  for (const auto& p : s.predictors) k += p + '\x1f';
  const auto& b = s.brt;
  k += std::to_string(b.tree_size) + '|' + std::to_string(b.learning_rate) + '|' + std::to_string(b.min_obs_leaf) +
       '|' + std::to_string(b.bag_fraction) + '|' + std::to_string(b.max_trees) + '|' +
       std::to_string(b.internal_cv_folds) + '|' + std::to_string(b.patience);
  return k;
}

// All specs of one repetition. Specs with the same predictors and boosting
// parameters share one trend fit.
std::vector<rep_result> run_repetition(const ingest::dataset& data, const std::vector<ingest::model_spec>& specs,
                                       const cv_settings& settings, std::size_t rep, std::span<const double> observed,
                                       double iq_y) {
  const auto folds = plan_repetition(data.size(), settings, rep);
  std::vector<rep_result> out(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    out[s].spec = s;
    out[s].repetition = rep;
  }
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto learning = data.subset(folds[f].learning);
    const auto validation = data.subset(folds[f].validation);
    const auto z = ingest::log_transform(learning);
    std::map<std::string, brt::boosted_model> trends;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      auto& res = out[s];
      if (!res.valid) continue;
      const auto key = trend_key(specs[s]);
      auto it = trends.find(key);
      if (it == trends.end())
        it = trends.emplace(key, brt::fit_brt(learning, z, specs[s], trend_seed(settings.seed, rep, f))).first;
      try {
        const auto model = fit_model(learning, specs[s], it->second, settings.spatial);
        const auto pred = predict(model, validation);
        res.folds.push_back(diagnose(model));
        for (std::size_t i = 0; i < pred.size(); ++i) {
          res.rows.push_back(folds[f].validation[i]);
          res.predicted.push_back(pred[i].y_hat);
        }
      } catch (const socmap::error& e) {
        if (e.kind() != ErrorKind::validity && e.kind() != ErrorKind::numeric) throw;
        res.valid = false;
        rep_diagnostics d;
        d.failure = e.what();
        d.spatial = specs[s].spatial;
        res.folds.push_back(std::move(d));
      }
    }
  }
  for (auto& res : out) {
    if (!res.valid) continue;
    std::vector<double> obs;
    obs.reserve(res.rows.size());
    for (auto r : res.rows) obs.push_back(observed[r]);
    res.metrics = compute_metrics(obs, res.predicted, iq_y);
  }
  return out;
}

metric_summary summarize(const std::vector<double>& v) {
  metric_summary s;
  s.n = v.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (v.empty()) return {nan, nan, nan, 0};
  s.mean = mean(v);
  if (v.size() < 2) {
    s.ci_lo = s.ci_hi = nan;
    return s;
  }
  const boost::math::students_t t(static_cast<double>(v.size() - 1));
  const double half = boost::math::quantile(t, 0.975) * std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
  s.ci_lo = s.mean - half;
  s.ci_hi = s.mean + half;
  return s;
}

}  // namespace

cv_report run_cv(const ingest::dataset& data, const std::vector<ingest::model_spec>& specs,
                 const cv_settings& settings) {
  validate(settings);
  if (specs.empty()) throw config_error("cross-validation needs at least one model spec");
  for (const auto& s : specs) ingest::validate(s, data.schema);
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j)
      if (specs[i].name == specs[j].name) throw config_error("duplicate model name '" + specs[i].name + "'");

  cv_report report;
  report.repetitions = settings.repetitions;
  report.alpha = settings.alpha;
  for (const auto& s : specs) report.models.push_back(s.name);
  report.observed = data.targets();
  report.iq_y = interquartile_range(report.observed);
  if (!(report.iq_y > 0.0)) report.iq_y = std::numeric_limits<double>::min();
  report.sites = data.locations();
  for (const auto& r : data.records) report.site_ids.push_back(r.site_id);

  const std::size_t reps = settings.repetitions;
  std::vector<std::vector<rep_result>> per_rep(reps);
  std::vector<std::exception_ptr> errors(reps);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t r = next++; r < reps; r = next++) {
      try {
        per_rep[r] = run_repetition(data, specs, settings, r, report.observed, report.iq_y);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  std::size_t workers = settings.workers ? settings.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, reps);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  report.results.resize(specs.size() * reps);
  for (std::size_t r = 0; r < reps; ++r)
    for (std::size_t s = 0; s < specs.size(); ++s) report.results[s * reps + r] = std::move(per_rep[r][s]);

  report.failed.assign(specs.size(), 0);
  report.summary.resize(specs.size());
  for (std::size_t s = 0; s < specs.size(); ++s) {
    for (std::size_t r = 0; r < reps; ++r)
      if (!report.at(s, r).valid) ++report.failed[s];
    for (std::size_t k = 0; k < all_metrics.size(); ++k) report.summary[s][k] = summarize(report.values(s, all_metrics[k]));
  }
  return report;
}

significance_matrix compare_models(const cv_report& report, metric m) {
  if (report.models.size() < 2) throw config_error("model comparison needs at least two models");
  std::vector<std::vector<double>> samples;
  for (std::size_t s = 0; s < report.models.size(); ++s) samples.push_back(report.values(s, m));
  return compare_samples(report.models, samples, report.alpha);
}

}  // namespace socmap::validation
