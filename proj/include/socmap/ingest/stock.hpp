#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace socmap::ingest {

// One sampled soil horizon. Depths in cm, bulk density in g/cm3, organic
// carbon as mass percent, rock fragments as a mass fraction.
struct horizon_record {
  std::string site_id;
  double top_cm = 0.0;
  double bottom_cm = 0.0;
  double bulk_density = 0.0;
  double soc_pct = 0.0;
  double rock_frag = 0.0;
};

// Organic carbon stock (kg/m2) of the layer [0, depth_cm]:
//   sum_i (p_i / 100) * (BD_i * 1000) * (SOC_i / 100) * (1 - rf_i)
// where p_i is the thickness of horizon i lying above depth_cm. Horizons may
// be given in any order but must tile [0, depth_cm] without gaps or overlaps.
// Excluding organic (OL/OH) horizons is up to the caller.
double compute_stock(std::span<const horizon_record> horizons, double depth_cm);

struct site_stock {
  std::string site_id;
  double stock = 0.0;
};

// Groups horizons by site (first-appearance order) and computes each stock.
std::vector<site_stock> compute_stocks(std::span<const horizon_record> horizons, double depth_cm);

// Horizon CSV: site_id,top_cm,bottom_cm,bulk_density,soc_pct,rock_frag
std::vector<horizon_record> read_horizons(std::istream& in);
std::vector<horizon_record> load_horizons(const std::filesystem::path& path);

void write_stocks(std::ostream& out, std::span<const site_stock> stocks);

}  // namespace socmap::ingest
