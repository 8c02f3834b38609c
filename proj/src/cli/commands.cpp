#include <socmap/cli/commands.hpp>

#include <socmap/brt/interpret.hpp>
#include <socmap/brt/serialize.hpp>
#include <socmap/cli/config.hpp>
#include <socmap/cli/manifest.hpp>
#include <socmap/ingest/stock.hpp>
#include <socmap/util/csv.hpp>
#include <socmap/util/stats.hpp>
#include <socmap/validation/report_io.hpp>

#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <ostream>

namespace socmap::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write " + path.string());
  return out;
}

void require_file(const fs::path& p) {
  if (!fs::exists(p)) throw config_error("input file " + p.string() + " does not exist");
}

run_config load_with(const fs::path& config, const overrides& o, manifest& m) {
  auto c = load_run_config(config);
  if (o.seed) {
    c.seed = *o.seed;
    c.cv.seed = *o.seed;
    m.settings.emplace_back("seed", std::to_string(*o.seed));
  }
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.workers) c.cv.workers = *o.workers;  // does not affect outputs; not recorded
  if (o.repetitions) {
    c.cv.repetitions = *o.repetitions;
    m.settings.emplace_back("repetitions", std::to_string(*o.repetitions));
  }
  if (o.epsilon) {
    c.cv.spatial.winsorize.epsilon = *o.epsilon;
    m.settings.emplace_back("epsilon", csv::format_exact(*o.epsilon));
  }
  validation::validate(c.cv);
  m.seed = c.seed;
  m.config = config;
  return c;
}

fs::path prepare(const fs::path& dir) {
  fs::create_directories(dir);
  return dir;
}

void write_importance(std::ostream& out, const brt::boosted_model& model) {
  out << "predictor,importance\n";
  for (const auto& s : brt::variable_importance(model))
    out << csv::escape(s.predictor) << ',' << csv::format_report(s.score) << '\n';
}

void write_partial_dependence(std::ostream& out, const brt::boosted_model& model, const brt::feature_matrix& x) {
  out << "covariate,value,level,prediction_z\n";
  for (const auto& p : model.predictors) {
    const auto curve = brt::partial_dependence(model, x, p.name);
    for (std::size_t k = 0; k < curve.grid.size(); ++k)
      out << csv::escape(curve.covariate) << ',' << csv::format_report(curve.grid[k]) << ','
          << (curve.categorical ? csv::escape(curve.labels[k]) : std::string()) << ','
          << csv::format_report(curve.values[k]) << '\n';
  }
}

void write_fit_info(std::ostream& out, const brt::boosted_model& model) {
  const auto& i = model.info;
  out << "iteration,train_deviance,cv_deviance\n";
  for (std::size_t k = 0; k < i.cv_deviance.size(); ++k)
    out << k << ',' << (k < i.train_deviance.size() ? csv::format_report(i.train_deviance[k]) : std::string("NA")) << ','
        << csv::format_report(i.cv_deviance[k]) << '\n';
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return exit_config;
    case ErrorKind::data: return exit_data;
    case ErrorKind::numeric: return exit_numeric;
    case ErrorKind::validity: return exit_validity;
  }
  return exit_other;
}

fs::path cmd_stock(const stock_args& args) {
  require_file(args.horizons);
  const auto dir = prepare(args.output_dir.value_or(default_output_dir()) / "stock");
  const auto stocks = ingest::compute_stocks(ingest::load_horizons(args.horizons), args.depth_cm);
  const auto path = dir / "stocks.csv";
  {
    auto out = open_out(path);
    ingest::write_stocks(out, stocks);
  }
  manifest m;
  m.command = "stock";
  m.inputs = {args.horizons};
  m.outputs = {path};
  m.settings.emplace_back("depth_cm", csv::format_exact(args.depth_cm));
  write_manifest(dir, m);
  return dir;
}

fs::path cmd_fit(const fs::path& config, const std::string& model, const overrides& o) {
  manifest m;
  m.command = "fit";
  const auto c = load_with(config, o, m);
  const auto& spec = c.model(model);
  require_file(c.sites);
  const auto data = ingest::load_dataset(c.sites, c.schema, ingest::load_mode::fit);
  const auto fitted = validation::fit_model(data, spec, c.seed, c.cv.spatial);
  const auto dir = prepare(c.output_dir / ("fit-" + spec.name));
  m.inputs = {c.sites};
  m.settings.emplace_back("model", spec.name);

  const auto model_path = dir / "model.brt";
  brt::save_model(model_path, fitted.trend);
  m.outputs.push_back(model_path);
  auto emit = [&](const char* name, auto&& fn) {
    const auto path = dir / name;
    auto out = open_out(path);
    fn(out);
    m.outputs.push_back(path);
  };
  emit("importance.csv", [&](std::ostream& out) { write_importance(out, fitted.trend); });
  const auto x = brt::feature_matrix::from_dataset(data, spec.predictors);
  emit("partial_dependence.csv", [&](std::ostream& out) { write_partial_dependence(out, fitted.trend, x); });
  emit("deviance.csv", [&](std::ostream& out) { write_fit_info(out, fitted.trend); });
  if (fitted.spatial) {
    const auto& sc = *fitted.spatial;
    emit("variogram.csv", [&](std::ostream& out) { validation::write_variogram(out, sc.empirical, sc.initial_model); });
    emit("matern.csv", [&](std::ostream& out) { validation::write_matern(out, sc.model()); });
    // Donor ids: the first learning site at each collapsed location.
    std::vector<std::string> ids(sc.donors.size());
    for (std::size_t i = sc.donor_of_site.size(); i-- > 0;) ids[sc.donor_of_site[i]] = data.records[i].site_id;
    emit("winsorize.csv", [&](std::ostream& out) { validation::write_winsorize(out, ids, sc.winsorized); });
  }
  write_manifest(dir, m);
  return dir;
}

fs::path cmd_cv(const fs::path& config, const overrides& o) {
  manifest m;
  m.command = "cv";
  const auto c = load_with(config, o, m);
  require_file(c.sites);
  const auto data = ingest::load_dataset(c.sites, c.schema, ingest::load_mode::fit);
  const auto report = validation::run_cv(data, c.models, c.cv);
  const auto dir = prepare(c.output_dir / "cv");
  m.inputs = {c.sites};
  m.outputs = validation::write_cv_report(dir, report);
  write_manifest(dir, m);
  return dir;
}

fs::path cmd_predict(const fs::path& config, const std::string& model, const fs::path& sites,
                     const std::optional<fs::path>& model_file, const overrides& o) {
  manifest m;
  m.command = "predict";
  const auto c = load_with(config, o, m);
  const auto& spec = c.model(model);
  require_file(c.sites);
  require_file(sites);
  const auto learning = ingest::load_dataset(c.sites, c.schema, ingest::load_mode::fit);
  const auto targets = ingest::load_dataset(sites, c.schema, ingest::load_mode::predict);
  m.inputs = {c.sites, sites};
  m.settings.emplace_back("model", spec.name);

  validation::fitted_model fitted;
  if (model_file) {
    require_file(*model_file);
    auto trend = brt::load_model(*model_file);
    std::vector<std::string> names;
    for (const auto& p : trend.predictors) names.push_back(p.name);
    if (names != spec.predictors)
      throw config_error(fmt::format("model file {} does not match the predictors of '{}'", model_file->string(), spec.name));
    fitted = validation::fit_model(learning, spec, std::move(trend), c.cv.spatial);
    m.inputs.push_back(*model_file);
  } else {
    fitted = validation::fit_model(learning, spec, c.seed, c.cv.spatial);
  }
  const auto rows = validation::predict(fitted, targets);
  const auto dir = prepare(c.output_dir / ("predict-" + spec.name));
  const auto path = dir / "predictions.csv";
  {
    auto out = open_out(path);
    validation::write_predictions(out, rows);
  }
  m.outputs = {path};
  write_manifest(dir, m);
  return dir;
}

fs::path cmd_simulate(const fs::path& config, const overrides& o) {
  auto c = load_sim_config(config);
  manifest m;
  m.command = "simulate";
  m.config = config;
  if (o.seed) {
    c.spec.seed = *o.seed;
    m.settings.emplace_back("seed", std::to_string(*o.seed));
  }
  if (o.output_dir) c.output_dir = *o.output_dir;
  m.seed = c.spec.seed;
  const auto sim = simulate::simulate_field(c.spec);
  const auto dir = prepare(c.output_dir / "simulate");
  const auto sites = dir / "sites.csv";
  const auto truth = dir / "truth.csv";
  const auto schema = dir / "schema.yaml";
  {
    auto out = open_out(sites);
    ingest::write_dataset(out, sim.data);
  }
  {
    auto out = open_out(truth);
    simulate::write_truth(out, sim);
  }
  {
    auto out = open_out(schema);
    out << "schema:\n";
    for (const auto& d : sim.data.schema.defs()) {
      out << "  - name: " << d.name << '\n';
      out << "    kind: " << (d.kind == ingest::covariate_kind::categorical ? "categorical" : "numeric") << '\n';
      if (!d.levels.empty()) {
        out << "    levels: [";
        for (std::size_t k = 0; k < d.levels.size(); ++k) out << (k ? ", " : "") << d.levels[k];
        out << "]\n";
      }
    }
  }
  m.outputs = {sites, truth, schema};
  write_manifest(dir, m);
  return dir;
}

void cmd_report(const fs::path& cv_dir, std::optional<double> alpha, std::ostream& out) {
  const auto path = cv_dir / "cv_long.csv";
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path.string());
  csv::reader reader(in);
  const auto header = reader.next();
  if (!header || header->fields != std::vector<std::string>{"model", "repetition", "valid", "metric", "value"})
    throw schema_error(path.string() + " is not a cv long-format file");

  std::vector<std::string> models;
  std::map<std::string, std::map<std::string, std::vector<double>>> values;  // metric -> model -> values
  std::map<std::string, std::size_t> failed;
  while (auto row = reader.next()) {
    if (row->fields.size() != 5) throw parse_error("expected 5 fields", row->line);
    const auto& model = row->fields[0];
    if (std::find(models.begin(), models.end(), model) == models.end()) models.push_back(model);
    auto& bucket = values[row->fields[3]][model];
    if (row->fields[2] != "1") {
      if (row->fields[3] == validation::to_string(validation::metric::mpe)) ++failed[model];
      continue;
    }
    const auto v = csv::parse_double(row->fields[4]);
    if (v && std::isfinite(*v)) bucket.push_back(*v);
  }
  const double a = alpha.value_or(0.05);

  out << fmt::format("{:<16} {:<8} {:>12} {:>12} {:>12} {:>6} {:>7}\n", "model", "metric", "mean", "ci_low", "ci_high",
                     "n", "failed");
  for (const auto& model : models)
    for (auto met : validation::all_metrics) {
      const auto name = std::string(validation::to_string(met));
      const auto& v = values[name][model];
      double mu = NAN, lo = NAN, hi = NAN;
      if (!v.empty()) mu = mean(v);
      if (v.size() >= 2) {
        const boost::math::students_t t(static_cast<double>(v.size() - 1));
        const double half = boost::math::quantile(t, 0.975) * std::sqrt(sample_variance(v) / static_cast<double>(v.size()));
        lo = mu - half;
        hi = mu + half;
      }
      out << fmt::format("{:<16} {:<8} {:>12.5g} {:>12.5g} {:>12.5g} {:>6} {:>7}\n", model, name, mu, lo, hi, v.size(),
                         failed[model]);
    }
  if (models.size() < 2) return;
  out << '\n';
  for (auto met : validation::all_metrics) {
    const auto name = std::string(validation::to_string(met));
    std::vector<std::vector<double>> samples;
    for (const auto& model : models) samples.push_back(values[name][model]);
    const auto sig = validation::compare_samples(models, samples, a);
    for (std::size_t i = 0; i < models.size(); ++i)
      for (std::size_t j = i + 1; j < models.size(); ++j) {
        const auto& cell = sig.cells[i][j];
        const char* verdict = cell.status == validation::pair_status::significant       ? "significant"
                              : cell.status == validation::pair_status::not_significant ? "not significant"
                                                                                        : "untestable";
        out << fmt::format("{:<8} {} vs {}: p = {:.4g} (alpha {:.4g}) {}\n", name, models[i], models[j], cell.p,
                           sig.adjusted_alpha, verdict);
      }
  }
}

}  // namespace socmap::cli
