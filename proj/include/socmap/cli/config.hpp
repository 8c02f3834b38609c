#pragma once

#include <socmap/ingest/dataset.hpp>
#include <socmap/ingest/model_spec.hpp>
#include <socmap/simulate/simulate.hpp>
#include <socmap/validation/cv.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socmap::cli {

// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "SOCMAP_OUTPUT_DIR";

std::filesystem::path default_output_dir();

// Everything a run needs, after defaults and level scanning. Relative paths in
// the file are resolved against the file's directory.
struct run_config {
  std::filesystem::path config_path;
  std::uint64_t seed = 0;
  std::filesystem::path sites;
  std::optional<std::filesystem::path> horizons;
  double depth_cm = 30.0;
  ingest::covariate_schema schema;
  std::vector<ingest::model_spec> models;
  validation::cv_settings cv;  // includes the residual geostatistics settings
  std::filesystem::path output_dir;

  const ingest::model_spec& model(std::string_view name) const;
};

run_config parse_run_config(std::string_view yaml_text, const std::filesystem::path& base_dir);
run_config load_run_config(const std::filesystem::path& path);

struct sim_config {
  std::filesystem::path config_path;
  simulate::sim_spec spec;
  std::filesystem::path output_dir;
};

sim_config parse_sim_config(std::string_view yaml_text, const std::filesystem::path& base_dir = {});
sim_config load_sim_config(const std::filesystem::path& path);

}  // namespace socmap::cli
