#include <socmap/cli/config.hpp>

#include <socmap/error.hpp>

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fmt/format.h>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace socmap::cli {
namespace {

namespace fs = std::filesystem;

void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!node) return;
  if (!node.IsMap()) throw config_error(fmt::format("'{}' must be a mapping", where));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw config_error(fmt::format("unknown key '{}' in '{}'", key, where));
  }
}

template <class T>
T get(const YAML::Node& node, std::string_view key, T fallback) {
  const auto v = node[std::string(key)];
  if (!v || v.IsNull()) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw config_error(fmt::format("bad value for '{}' at line {}", key, v.Mark().line + 1));
  }
}

template <class T>
T require(const YAML::Node& node, std::string_view key, std::string_view where) {
  const auto v = node[std::string(key)];
  if (!v || v.IsNull()) throw config_error(fmt::format("'{}' needs '{}'", where, key));
  return get<T>(node, key, T{});
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() ? p : base / p; }

ingest::brt_params parse_brt(const YAML::Node& n, ingest::brt_params p, std::string_view where) {
  if (!n) return p;
  check_keys(n, {"tree_size", "learning_rate", "min_obs_leaf", "bag_fraction", "max_trees", "internal_cv_folds",
                 "patience"},
             where);
  p.tree_size = get(n, "tree_size", p.tree_size);
  p.learning_rate = get(n, "learning_rate", p.learning_rate);
  p.min_obs_leaf = get(n, "min_obs_leaf", p.min_obs_leaf);
  p.bag_fraction = get(n, "bag_fraction", p.bag_fraction);
  p.max_trees = get(n, "max_trees", p.max_trees);
  p.internal_cv_folds = get(n, "internal_cv_folds", p.internal_cv_folds);
  p.patience = get(n, "patience", p.patience);
  ingest::validate(p);
  return p;
}

validation::spatial_options parse_spatial(const YAML::Node& n) {
  validation::spatial_options o;
  auto& w = o.winsorize;
  if (!n) return o;
  check_keys(n, {"epsilon", "estimator", "bins", "max_lag_km", "fixed_kappa", "c_min", "c_max", "max_iterations",
                 "refit_variogram"},
             "spatial");
  w.epsilon = get(n, "epsilon", w.epsilon);
  w.estimator = variogram::estimator_from_string(get<std::string>(n, "estimator", "dowd"));
  w.bins.bin_count = get(n, "bins", w.bins.bin_count);
  w.bins.max_lag_km = get(n, "max_lag_km", w.bins.max_lag_km);
  if (n["fixed_kappa"] && !n["fixed_kappa"].IsNull()) w.fit.fixed_smoothness = get(n, "fixed_kappa", 0.5);
  w.c_min = get(n, "c_min", w.c_min);
  w.c_max = get(n, "c_max", w.c_max);
  w.max_iterations = get(n, "max_iterations", w.max_iterations);
  w.refit_variogram = get(n, "refit_variogram", w.refit_variogram);
  if (!(w.epsilon >= 0.0 && w.epsilon < 1.0)) throw config_error("spatial.epsilon must lie in [0, 1)");
  if (w.bins.bin_count < 4) throw config_error("spatial.bins must be at least 4");
  if (!(w.c_min > 0.0 && w.c_min < w.c_max)) throw config_error("spatial needs 0 < c_min < c_max");
  if (w.max_iterations < 1) throw config_error("spatial.max_iterations must be at least 1");
  return o;
}

YAML::Node parse_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw config_error(std::string("malformed configuration: ") + e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open configuration " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

fs::path default_output_dir() {
  if (const char* env = std::getenv(output_dir_env); env && *env) return env;
  return "socmap-out";
}

const ingest::model_spec& run_config::model(std::string_view name) const {
  for (const auto& m : models)
    if (m.name == name) return m;
  throw lookup_error(fmt::format("no model named '{}' in the configuration", name));
}

run_config parse_run_config(std::string_view yaml_text, const fs::path& base_dir) {
  const auto root = parse_yaml(yaml_text);
  if (!root.IsMap()) throw config_error("configuration must be a mapping");
  check_keys(root, {"seed", "output_dir", "data", "schema", "brt", "models", "cv", "spatial"}, "top level");

  run_config c;
  c.seed = require<std::uint64_t>(root, "seed", "configuration");
  c.output_dir = root["output_dir"] ? resolve(base_dir, get<std::string>(root, "output_dir", "")) : default_output_dir();

  const auto data = root["data"];
  if (!data) throw config_error("configuration needs a 'data' section");
  check_keys(data, {"sites", "horizons", "depth_cm"}, "data");
  c.sites = resolve(base_dir, require<std::string>(data, "sites", "data"));
  if (data["horizons"]) c.horizons = resolve(base_dir, get<std::string>(data, "horizons", ""));
  c.depth_cm = get(data, "depth_cm", c.depth_cm);
  if (!(c.depth_cm > 0.0)) throw config_error("data.depth_cm must be > 0");

  std::vector<ingest::covariate_def> defs;
  const auto schema = root["schema"];
  if (schema && !schema.IsSequence()) throw config_error("'schema' must be a list");
  if (schema)
    for (const auto& item : schema) {
      check_keys(item, {"name", "kind", "levels", "missing_allowed"}, "schema entry");
      ingest::covariate_def d;
      d.name = require<std::string>(item, "name", "schema entry");
      const auto kind = get<std::string>(item, "kind", "numeric");
      if (kind == "categorical")
        d.kind = ingest::covariate_kind::categorical;
      else if (kind != "numeric")
        throw config_error(fmt::format("covariate '{}': kind must be numeric or categorical", d.name));
      d.missing_allowed = get(item, "missing_allowed", true);
      if (d.kind == ingest::covariate_kind::categorical) {
        if (item["levels"])
          d.levels = get<std::vector<std::string>>(item, "levels", {});
        else if (fs::exists(c.sites))
          d.levels = ingest::scan_levels(c.sites, d.name);
        else
          throw config_error(fmt::format("covariate '{}' has no levels and {} does not exist", d.name, c.sites.string()));
      } else if (item["levels"]) {
        throw config_error(fmt::format("numeric covariate '{}' cannot have levels", d.name));
      }
      defs.push_back(std::move(d));
    }
  try {
    c.schema = ingest::covariate_schema(std::move(defs));
  } catch (const data_error& e) {
    throw config_error(e.what());
  }

  const auto defaults = parse_brt(root["brt"], {}, "brt");
  const auto models = root["models"];
  if (!models || !models.IsSequence() || models.size() == 0) throw config_error("configuration needs a 'models' list");
  for (const auto& item : models) {
    check_keys(item, {"name", "predictors", "spatial", "brt"}, "model");
    ingest::model_spec m;
    m.name = require<std::string>(item, "name", "model");
    m.predictors = get<std::vector<std::string>>(item, "predictors", {});
    m.spatial = get(item, "spatial", false);
    m.brt = parse_brt(item["brt"], defaults, "model brt");
    ingest::validate(m, c.schema);
    for (const auto& other : c.models)
      if (other.name == m.name) throw config_error(fmt::format("duplicate model name '{}'", m.name));
    c.models.push_back(std::move(m));
  }

  const auto cv = root["cv"];
  check_keys(cv, {"repetitions", "validation_fraction", "alpha", "full_rotation", "workers"}, "cv");
  if (cv) {
    c.cv.repetitions = get(cv, "repetitions", c.cv.repetitions);
    c.cv.validation_fraction = get(cv, "validation_fraction", c.cv.validation_fraction);
    c.cv.alpha = get(cv, "alpha", c.cv.alpha);
    c.cv.full_rotation = get(cv, "full_rotation", c.cv.full_rotation);
    c.cv.workers = get(cv, "workers", c.cv.workers);
  }
  c.cv.seed = c.seed;
  c.cv.spatial = parse_spatial(root["spatial"]);
  validation::validate(c.cv);
  return c;
}

run_config load_run_config(const fs::path& path) {
  auto c = parse_run_config(read_file(path), path.parent_path());
  c.config_path = path;
  return c;
}

namespace {

simulate::covariate_effect parse_effect(const YAML::Node& n, const std::string& name) {
  simulate::covariate_effect e;
  if (!n) return e;
  check_keys(n, {"kind", "coefficient", "threshold", "low", "high", "amplitude", "period", "levels"}, "effect");
  const auto kind = get<std::string>(n, "kind", "linear");
  if (kind == "linear")
    e.kind = simulate::effect_kind::linear;
  else if (kind == "step")
    e.kind = simulate::effect_kind::step;
  else if (kind == "sine")
    e.kind = simulate::effect_kind::sine;
  else if (kind == "levels")
    e.kind = simulate::effect_kind::levels;
  else
    throw config_error(fmt::format("covariate '{}': unknown effect kind '{}'", name, kind));
  e.coefficient = get(n, "coefficient", e.coefficient);
  e.threshold = get(n, "threshold", e.threshold);
  e.low = get(n, "low", e.low);
  e.high = get(n, "high", e.high);
  e.amplitude = get(n, "amplitude", e.amplitude);
  e.period = get(n, "period", e.period);
  e.level_effects = get<std::vector<double>>(n, "levels", {});
  return e;
}

}  // namespace

sim_config parse_sim_config(std::string_view yaml_text, const fs::path& base_dir) {
  const auto root = parse_yaml(yaml_text);
  if (!root.IsMap()) throw config_error("simulation configuration must be a mapping");
  check_keys(root, {"seed", "output_dir", "layout", "intercept", "residual", "lognormal", "contamination", "covariates"},
             "top level");
  sim_config c;
  auto& s = c.spec;
  s.seed = require<std::uint64_t>(root, "seed", "simulation configuration");
  c.output_dir = root["output_dir"] ? resolve(base_dir, get<std::string>(root, "output_dir", "")) : default_output_dir();

  if (const auto l = root["layout"]) {
    check_keys(l, {"kind", "spacing_km", "nx", "ny", "count", "width_km", "height_km"}, "layout");
    const auto kind = get<std::string>(l, "kind", "grid");
    if (kind == "random")
      s.layout.kind = simulate::layout_kind::random;
    else if (kind != "grid")
      throw config_error("layout.kind must be grid or random");
    s.layout.spacing_km = get(l, "spacing_km", s.layout.spacing_km);
    s.layout.nx = get(l, "nx", s.layout.nx);
    s.layout.ny = get(l, "ny", s.layout.ny);
    s.layout.count = get(l, "count", s.layout.count);
    s.layout.width_km = get(l, "width_km", s.layout.width_km);
    s.layout.height_km = get(l, "height_km", s.layout.height_km);
  }
  s.intercept = get(root, "intercept", s.intercept);
  if (const auto r = root["residual"]) {
    check_keys(r, {"c0", "c1", "phi", "kappa"}, "residual");
    s.residual.nugget = get(r, "c0", s.residual.nugget);
    s.residual.partial_sill = get(r, "c1", s.residual.partial_sill);
    s.residual.range = get(r, "phi", s.residual.range);
    s.residual.smoothness = get(r, "kappa", s.residual.smoothness);
  }
  s.lognormal = get(root, "lognormal", s.lognormal);
  if (const auto ct = root["contamination"]) {
    check_keys(ct, {"fraction", "magnitude"}, "contamination");
    s.contam.fraction = get(ct, "fraction", s.contam.fraction);
    s.contam.magnitude = get(ct, "magnitude", s.contam.magnitude);
  }
  if (const auto covs = root["covariates"]) {
    if (!covs.IsSequence()) throw config_error("'covariates' must be a list");
    for (const auto& item : covs) {
      check_keys(item, {"name", "generator", "lo", "hi", "noise_sd", "range_km", "smoothness", "block_km", "levels",
                        "effect", "missing_fraction"},
                 "covariate");
      simulate::sim_covariate cv;
      cv.name = require<std::string>(item, "name", "covariate");
      const auto gen = get<std::string>(item, "generator", "uniform");
      if (gen == "uniform")
        cv.generator = simulate::generator_kind::uniform;
      else if (gen == "gradient_x")
        cv.generator = simulate::generator_kind::gradient_x;
      else if (gen == "gradient_y")
        cv.generator = simulate::generator_kind::gradient_y;
      else if (gen == "field")
        cv.generator = simulate::generator_kind::field;
      else if (gen == "blocks")
        cv.generator = simulate::generator_kind::blocks;
      else
        throw config_error(fmt::format("covariate '{}': unknown generator '{}'", cv.name, gen));
      cv.lo = get(item, "lo", cv.lo);
      cv.hi = get(item, "hi", cv.hi);
      cv.noise_sd = get(item, "noise_sd", cv.noise_sd);
      cv.range_km = get(item, "range_km", cv.range_km);
      cv.smoothness = get(item, "smoothness", cv.smoothness);
      cv.block_km = get(item, "block_km", cv.block_km);
      cv.level_count = get(item, "levels", cv.level_count);
      cv.effect = parse_effect(item["effect"], cv.name);
      cv.missing_fraction = get(item, "missing_fraction", cv.missing_fraction);
      s.covariates.push_back(std::move(cv));
    }
  }
  simulate::validate(s);
  return c;
}

sim_config load_sim_config(const fs::path& path) {
  auto c = parse_sim_config(read_file(path), path.parent_path());
  c.config_path = path;
  return c;
}

}  // namespace socmap::cli
