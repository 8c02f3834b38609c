#include <socmap/brt/boosting.hpp>

#include <socmap/error.hpp>
#include <socmap/util/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

namespace socmap::brt {
namespace {

// Random streams under the fitting seed.
constexpr std::uint64_t fold_stream = 1;
constexpr std::uint64_t fold_learner_stream = 2;
constexpr std::uint64_t final_stream = 3;

// One stagewise fit over a subset of rows, tracking predictions for all rows
// so held-out deviance can be read after every stage.
class stage_learner {
 public:
  stage_learner(const feature_matrix& x, std::span<const double> z,
                std::vector<std::size_t> learning_rows, const ingest::brt_params& params, rng_t rng)
      : x_(x), z_(z), rows_(std::move(learning_rows)), params_(params), rng_(std::move(rng)),
        residual_(z.size(), 0.0) {
    double s = 0.0;
    for (auto i : rows_) s += z_[i];
    initial_ = s / static_cast<double>(rows_.size());
    f_.assign(z.size(), initial_);
    const double raw = params_.bag_fraction * static_cast<double>(rows_.size());
    bag_size_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(raw - 1e-9)), 1, rows_.size());
  }

  double initial() const noexcept { return initial_; }

  regression_tree step() {
    for (auto i : rows_) residual_[i] = z_[i] - f_[i];
    auto picks = sample_without_replacement(rows_.size(), bag_size_, rng_);
    std::vector<std::size_t> bag;
    bag.reserve(picks.size());
    for (auto p : picks) bag.push_back(rows_[p]);
    std::sort(bag.begin(), bag.end());

    auto tree = grow_tree(x_, residual_, bag, {params_.tree_size, params_.min_obs_leaf});
    for (std::size_t i = 0; i < f_.size(); ++i) f_[i] += params_.learning_rate * tree.predict(x_.row(i));
    return tree;
  }

  double deviance(std::span<const std::size_t> rows) const {
    double s = 0.0;
    for (auto i : rows) s += (z_[i] - f_[i]) * (z_[i] - f_[i]);
    return s / static_cast<double>(rows.size());
  }

 private:
  const feature_matrix& x_;
  std::span<const double> z_;
  std::vector<std::size_t> rows_;
  ingest::brt_params params_;
  rng_t rng_;
  std::vector<double> residual_;
  std::vector<double> f_;
  double initial_ = 0.0;
  std::size_t bag_size_ = 1;
};

// Returns the CV deviance curve; its argmin is the stopping iteration.
std::vector<double> internal_cv_curve(const feature_matrix& x, std::span<const double> z,
                                      const ingest::brt_params& params, std::uint64_t seed) {
  const std::size_t n = z.size();
  const auto folds = static_cast<std::size_t>(std::min<std::size_t>(params.internal_cv_folds, n));
  auto fold_rng = make_rng(seed, {fold_stream});
  const auto perm = random_permutation(n, fold_rng);
  std::vector<std::vector<std::size_t>> held_out(folds);
  for (std::size_t p = 0; p < n; ++p) held_out[p % folds].push_back(perm[p]);

  std::vector<stage_learner> learners;
  learners.reserve(folds);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<bool> out(n, false);
    for (auto i : held_out[k]) out[i] = true;
    std::vector<std::size_t> learn;
    for (std::size_t i = 0; i < n; ++i)
      if (!out[i]) learn.push_back(i);
    learners.emplace_back(x, z, std::move(learn), params, make_rng(seed, {fold_learner_stream, k}));
  }

  auto mean_deviance = [&] {
    double s = 0.0;
    for (std::size_t k = 0; k < folds; ++k) s += learners[k].deviance(held_out[k]);
    return s / static_cast<double>(folds);
  };

  std::vector<double> curve{mean_deviance()};
  std::size_t best = 0;
  for (int m = 1; m <= params.max_trees; ++m) {
    for (auto& l : learners) l.step();
    curve.push_back(mean_deviance());
    if (curve.back() < curve[best]) best = curve.size() - 1;
    if (params.patience > 0 && curve.size() - 1 - best >= static_cast<std::size_t>(params.patience)) break;
  }
  return curve;
}

}  // namespace

double boosted_model::predict_row(std::span<const double> row) const {
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(row);
  return initial_value + learning_rate * s;
}

boosted_model fit_brt(const feature_matrix& x, std::span<const double> z,
                      const ingest::brt_params& params, std::uint64_t seed) {
  ingest::validate(params);
  if (x.cols() == 0) throw config_error("boosting needs at least one predictor");
  if (x.rows() != z.size()) throw data_error("feature rows and targets differ in length");
  const std::size_t n = z.size();
  if (n < 2 * static_cast<std::size_t>(params.min_obs_leaf))
    throw data_error(fmt::format("boosting needs at least {} rows, got {}", 2 * params.min_obs_leaf, n));
  for (double v : z)
    if (!std::isfinite(v)) throw data_error("non-finite boosting target");

  boosted_model model;
  model.learning_rate = params.learning_rate;
  model.predictors = x.predictors();
  model.info.seed = seed;
  model.info.params = params;
  model.info.n_learning = static_cast<std::uint32_t>(n);
  model.initial_value = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(n);

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  if (*lo == *hi || params.max_trees == 0) {
    stage_learner constant(x, z, all, params, make_rng(seed, {final_stream}));
    model.info.train_deviance = {constant.deviance(all)};
    model.info.cv_deviance = {};
    return model;
  }

  model.info.cv_deviance = internal_cv_curve(x, z, params, seed);
  const auto& curve = model.info.cv_deviance;
  const auto best = static_cast<std::size_t>(std::min_element(curve.begin(), curve.end()) - curve.begin());
  model.info.best_iteration = static_cast<std::uint32_t>(best);
  model.info.stopping_reached = best < static_cast<std::size_t>(params.max_trees);

  stage_learner final(x, z, all, params, make_rng(seed, {final_stream}));
  model.initial_value = final.initial();
  model.info.train_deviance.push_back(final.deviance(all));
  model.trees.reserve(best);
  for (std::size_t m = 0; m < best; ++m) {
    model.trees.push_back(final.step());
    model.info.train_deviance.push_back(final.deviance(all));
  }
  return model;
}

boosted_model fit_brt(const ingest::dataset& data, std::span<const double> z,
                      const ingest::model_spec& spec, std::uint64_t seed) {
  ingest::validate(spec, data.schema);
  return fit_brt(feature_matrix::from_dataset(data, spec.predictors), z, spec.brt, seed);
}

std::vector<double> predict_brt(const boosted_model& model, const feature_matrix& x) {
  if (x.predictors() != model.predictors)
    throw schema_error("feature matrix is not encoded with the model's predictors");
  std::vector<double> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = model.predict_row(x.row(i));
  return out;
}

std::vector<double> predict_brt(const boosted_model& model, const ingest::dataset& data) {
  return predict_brt(model, feature_matrix::encode(data, model.predictors));
}

}  // namespace socmap::brt
