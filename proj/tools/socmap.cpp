// socmap: stocks, fitting, cross-validation, prediction and simulation from
// the command line. Run `socmap <command> --help` for the flags.

#include <socmap/cli/commands.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

namespace {

namespace fs = std::filesystem;
using namespace socmap::cli;

struct shared_flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> repetitions;
  std::optional<double> epsilon;

  overrides get() const {
    overrides o;
    o.seed = seed;
    if (out) o.output_dir = fs::path(*out);
    o.workers = workers;
    o.repetitions = repetitions;
    o.epsilon = epsilon;
    return o;
  }
};

void add_seed_out(CLI::App* app, shared_flags& f) {
  app->add_option("--seed", f.seed, "Override the configured seed");
  app->add_option("--out", f.out, "Output directory (default: config output_dir, $SOCMAP_OUTPUT_DIR, ./socmap-out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soil organic carbon mapping with boosted trees and robust residual kriging"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SOCMAP_VERSION_STRING);

  shared_flags flags;
  std::string config;
  std::string model;

  auto* stock = app.add_subcommand("stock", "Layer stocks from a horizon table");
  stock_args sargs;
  std::string horizons;
  std::optional<std::string> stock_out;
  stock->add_option("--horizons", horizons, "Horizon CSV")->required()->check(CLI::ExistingFile);
  stock->add_option("--depth", sargs.depth_cm, "Layer depth in cm")->capture_default_str();
  stock->add_option("--out", stock_out, "Output directory");

  auto* fit = app.add_subcommand("fit", "Fit one model on every site; write the model and its reports");
  fit->add_option("--config", config, "Run configuration (YAML)")->required();
  fit->add_option("--model", model, "Model name from the configuration")->required();
  add_seed_out(fit, flags);
  fit->add_option("--epsilon", flags.epsilon, "Relative measurement error of the target");

  auto* cv = app.add_subcommand("cv", "Monte Carlo cross-validation of every configured model");
  cv->add_option("--config", config, "Run configuration (YAML)")->required();
  add_seed_out(cv, flags);
  cv->add_option("--workers", flags.workers, "Parallel repetitions (default: all cores)");
  cv->add_option("--repetitions", flags.repetitions, "Override the number of repetitions");
  cv->add_option("--epsilon", flags.epsilon, "Relative measurement error of the target");

  auto* predict = app.add_subcommand("predict", "Predict stocks at new sites");
  std::string sites;
  std::optional<std::string> model_file;
  predict->add_option("--config", config, "Run configuration (YAML)")->required();
  predict->add_option("--model", model, "Model name from the configuration")->required();
  predict->add_option("--sites", sites, "Site CSV to predict at")->required();
  predict->add_option("--model-file", model_file, "Saved trend model from `fit` (refitted when absent)");
  add_seed_out(predict, flags);
  predict->add_option("--epsilon", flags.epsilon, "Relative measurement error of the target");

  auto* sim = app.add_subcommand("simulate", "Synthetic site table with known structure");
  sim->add_option("--config", config, "Simulation configuration (YAML)")->required();
  add_seed_out(sim, flags);

  auto* report = app.add_subcommand("report", "Summarize a cv output directory");
  std::string cv_dir;
  std::optional<double> alpha;
  report->add_option("dir", cv_dir, "Directory written by `cv`")->required()->check(CLI::ExistingDirectory);
  report->add_option("--alpha", alpha, "Family-wise significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    fs::path written;
    if (*stock) {
      sargs.horizons = horizons;
      if (stock_out) sargs.output_dir = fs::path(*stock_out);
      written = cmd_stock(sargs);
    } else if (*fit) {
      written = cmd_fit(config, model, flags.get());
    } else if (*cv) {
      written = cmd_cv(config, flags.get());
    } else if (*predict) {
      std::optional<fs::path> mf;
      if (model_file) mf = fs::path(*model_file);
      written = cmd_predict(config, model, sites, mf, flags.get());
    } else if (*sim) {
      written = cmd_simulate(config, flags.get());
    } else if (*report) {
      cmd_report(cv_dir, alpha, std::cout);
      return exit_ok;
    }
    std::cout << written.string() << '\n';
    return exit_ok;
  } catch (const socmap::error& e) {
    std::cerr << "socmap: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "socmap: " << e.what() << '\n';
    return exit_other;
  }
}
