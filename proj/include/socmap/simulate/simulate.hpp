#pragma once

#include <socmap/geometry.hpp>
#include <socmap/ingest/dataset.hpp>
#include <socmap/util/random.hpp>
#include <socmap/variogram/matern.hpp>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace socmap::simulate {

inline constexpr std::size_t max_sites = 5000;

enum class layout_kind { grid, random };

struct site_layout {
  layout_kind kind = layout_kind::grid;
  double spacing_km = 16.0;  // grid
  int nx = 20, ny = 20;      // grid
  std::size_t count = 400;   // random
  double width_km = 320.0;   // random
  double height_km = 320.0;  // random

  std::size_t size() const;
  double extent_x() const;
  double extent_y() const;
};

enum class generator_kind {
  uniform,     // U(lo, hi)
  gradient_x,  // lo + (hi - lo) * x / extent, plus N(0, noise_sd)
  gradient_y,
  field,       // unit-variance Matérn field with the given range/smoothness, shifted by lo
  blocks       // categorical: each square block of side block_km gets a random level
};

enum class effect_kind { linear, step, sine, levels };

struct covariate_effect {
  effect_kind kind = effect_kind::linear;
  double coefficient = 0.0;                 // linear: coefficient * v
  double threshold = 0.0;                   // step: v < threshold ? low : high
  double low = 0.0, high = 0.0;
  double amplitude = 0.0, period = 1.0;     // sine: amplitude * sin(2 pi v / period)
  std::vector<double> level_effects;        // levels: effect per level code
};

struct sim_covariate {
  std::string name;
  generator_kind generator = generator_kind::uniform;
  double lo = 0.0, hi = 1.0;
  double noise_sd = 0.0;
  double range_km = 50.0, smoothness = 0.5;  // field
  double block_km = 64.0;                    // blocks
  int level_count = 4;                       // blocks; levels are named L0, L1, ...
  covariate_effect effect;
  double missing_fraction = 0.0;  // applied after the trend is computed
};

struct contamination {
  double fraction = 0.0;   // in [0, 0.2]
  double magnitude = 10.0; // multiplier on the original scale
};

struct sim_spec {
  site_layout layout;
  std::vector<sim_covariate> covariates;
  double intercept = 1.0;
  variogram::matern_model residual{0.1, 0.05, 50.0, 0.5};
  bool lognormal = true;
  contamination contam;
  std::uint64_t seed = 1;
};

void validate(const sim_spec& spec);

struct ground_truth {
  double trend = 0.0;
  double grf = 0.0;
  double nugget = 0.0;
  bool contaminated = false;
};

struct sim_output {
  ingest::dataset data;
  std::vector<ground_truth> truth;
};

// z = trend + GRF + nugget noise; target = exp(z) when lognormal, else z.
sim_output simulate_field(const sim_spec& spec);

std::vector<location> make_layout(const site_layout& layout, rng_t& rng);

// Zero-mean Gaussian field with covariance c1 rho(h) (no nugget), by Cholesky
// with a 1e-10 c1 diagonal jitter.
std::vector<double> sample_grf(std::span<const location> sites, double partial_sill, double range,
                               double smoothness, rng_t& rng);

// Header site_id,trend,grf,nugget,contaminated.
void write_truth(std::ostream& out, const sim_output& sim);

}  // namespace socmap::simulate
