#include <socmap/ingest/stock.hpp>

#include <socmap/error.hpp>
#include <socmap/util/csv.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

#include <fmt/format.h>

namespace socmap::ingest {
namespace {

void check_horizon(const horizon_record& h) {
  const auto where = fmt::format("site '{}' horizon {}-{} cm", h.site_id, h.top_cm, h.bottom_cm);
  if (!std::isfinite(h.top_cm) || !std::isfinite(h.bottom_cm) || h.top_cm < 0.0)
    throw validation_error(where + ": depths must be finite and non-negative");
  if (!(h.bottom_cm > h.top_cm)) throw validation_error(where + ": bottom must exceed top");
  if (!(h.bulk_density > 0.0) || !std::isfinite(h.bulk_density))
    throw validation_error(where + ": bulk density must be positive");
  if (!(h.soc_pct >= 0.0 && h.soc_pct <= 100.0))
    throw validation_error(where + ": organic carbon percent must lie in [0, 100]");
  if (!(h.rock_frag >= 0.0 && h.rock_frag <= 1.0))
    throw validation_error(where + ": rock fragment fraction must lie in [0, 1]");
}

}  // namespace

double compute_stock(std::span<const horizon_record> horizons, double depth_cm) {
  if (!(depth_cm > 0.0) || !std::isfinite(depth_cm))
    throw validation_error("layer depth must be positive");
  if (horizons.empty()) throw coverage_error("no horizons supplied");
  for (const auto& h : horizons) check_horizon(h);

  std::vector<horizon_record> sorted(horizons.begin(), horizons.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.top_cm < b.top_cm; });

  const auto& site = sorted.front().site_id;
  if (sorted.front().top_cm != 0.0)
    throw coverage_error(fmt::format("site '{}': first horizon starts at {} cm, not 0", site,
                                     sorted.front().top_cm));
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double prev_bottom = sorted[i - 1].bottom_cm;
    const double top = sorted[i].top_cm;
    if (top < prev_bottom)
      throw coverage_error(fmt::format("site '{}': horizons overlap at {} cm", site, top));
    if (top > prev_bottom && prev_bottom < depth_cm)
      throw coverage_error(
          fmt::format("site '{}': gap between {} and {} cm", site, prev_bottom, top));
  }
  if (sorted.back().bottom_cm < depth_cm)
    throw coverage_error(fmt::format("site '{}': horizons end at {} cm, short of {} cm", site,
                                     sorted.back().bottom_cm, depth_cm));

  double stock = 0.0;
  for (const auto& h : sorted) {
    if (h.top_cm >= depth_cm) break;
    const double thickness = std::min(h.bottom_cm, depth_cm) - h.top_cm;
    stock += (thickness / 100.0) * (h.bulk_density * 1000.0) * (h.soc_pct / 100.0) *
             (1.0 - h.rock_frag);
  }
  return stock;
}

std::vector<site_stock> compute_stocks(std::span<const horizon_record> horizons, double depth_cm) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<horizon_record>> by_site;
  for (const auto& h : horizons) {
    auto [it, inserted] = by_site.try_emplace(h.site_id);
    if (inserted) order.push_back(h.site_id);
    it->second.push_back(h);
  }
  std::vector<site_stock> out;
  out.reserve(order.size());
  for (const auto& id : order) out.push_back({id, compute_stock(by_site.at(id), depth_cm)});
  return out;
}

std::vector<horizon_record> read_horizons(std::istream& in) {
  static const std::vector<std::string> expected = {"site_id",      "top_cm",  "bottom_cm",
                                                    "bulk_density", "soc_pct", "rock_frag"};
  csv::reader reader(in);
  auto header = reader.next();
  if (!header) throw schema_error("horizon file is empty");
  if (header->fields != expected)
    throw schema_error("horizon header must be: site_id,top_cm,bottom_cm,bulk_density,soc_pct,rock_frag");

  std::vector<horizon_record> out;
  while (auto r = reader.next()) {
    if (r->fields.size() != expected.size())
      throw parse_error(fmt::format("expected {} fields, found {}", expected.size(), r->fields.size()),
                        r->line);
    horizon_record h;
    h.site_id = r->fields[0];
    if (h.site_id.empty()) throw parse_error("empty site_id", r->line);
    double* targets[] = {&h.top_cm, &h.bottom_cm, &h.bulk_density, &h.soc_pct, &h.rock_frag};
    for (std::size_t k = 0; k < 5; ++k) {
      auto v = csv::parse_double(r->fields[k + 1]);
      if (!v) throw parse_error(fmt::format("column '{}' is not a number", expected[k + 1]), r->line);
      *targets[k] = *v;
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<horizon_record> load_horizons(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open horizon file " + path.string());
  return read_horizons(in);
}

void write_stocks(std::ostream& out, std::span<const site_stock> stocks) {
  out << "site_id,target\n";
  for (const auto& s : stocks) out << csv::escape(s.site_id) << ',' << csv::format_exact(s.stock) << '\n';
}

}  // namespace socmap::ingest
