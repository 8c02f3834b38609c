#pragma once

#include <socmap/error.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace socmap::cli {

enum exit_code : int {
  exit_ok = 0,
  exit_other = 1,
  exit_config = 2,
  exit_data = 3,
  exit_numeric = 4,
  exit_validity = 5,
};

int exit_code_for(ErrorKind kind);

// Flags that override configuration values.
struct overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> repetitions;
  std::optional<double> epsilon;
};

struct stock_args {
  std::filesystem::path horizons;
  double depth_cm = 30.0;
  std::optional<std::filesystem::path> output_dir;
};

// Each command writes into its own subdirectory of the output directory and
// returns that subdirectory.
std::filesystem::path cmd_stock(const stock_args& args);
std::filesystem::path cmd_fit(const std::filesystem::path& config, const std::string& model, const overrides& o);
std::filesystem::path cmd_cv(const std::filesystem::path& config, const overrides& o);
std::filesystem::path cmd_predict(const std::filesystem::path& config, const std::string& model,
                                  const std::filesystem::path& sites,
                                  const std::optional<std::filesystem::path>& model_file, const overrides& o);
std::filesystem::path cmd_simulate(const std::filesystem::path& config, const overrides& o);

// Summary table and Bonferroni-adjusted comparisons recomputed from a cv
// directory's long-format file.
void cmd_report(const std::filesystem::path& cv_dir, std::optional<double> alpha, std::ostream& out);

}  // namespace socmap::cli
