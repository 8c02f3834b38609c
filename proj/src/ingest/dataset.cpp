#include <socmap/ingest/dataset.hpp>

#include <socmap/error.hpp>
#include <socmap/util/csv.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

namespace socmap::ingest {

covariate_schema::covariate_schema(std::vector<covariate_def> defs) : defs_(std::move(defs)) {
  std::set<std::string> seen;
  static const std::set<std::string> reserved = {"site_id", "x_km", "y_km", "target"};
  for (const auto& d : defs_) {
    if (d.name.empty()) throw schema_error("covariate with empty name");
    if (reserved.count(d.name)) throw schema_error("covariate name '" + d.name + "' is reserved");
    if (!seen.insert(d.name).second) throw schema_error("duplicate covariate '" + d.name + "'");
    if (d.kind == covariate_kind::categorical) {
      if (d.levels.empty()) throw schema_error("categorical covariate '" + d.name + "' has no levels");
      std::set<std::string> lv(d.levels.begin(), d.levels.end());
      if (lv.size() != d.levels.size())
        throw schema_error("categorical covariate '" + d.name + "' repeats a level");
    }
  }
}

std::optional<std::size_t> covariate_schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < defs_.size(); ++i)
    if (defs_[i].name == name) return i;
  return std::nullopt;
}

std::optional<int> covariate_schema::level_code(std::size_t column, std::string_view level) const {
  const auto& levels = defs_.at(column).levels;
  auto it = std::find(levels.begin(), levels.end(), level);
  if (it == levels.end()) return std::nullopt;
  return static_cast<int>(it - levels.begin());
}

bool operator==(const covariate_schema& a, const covariate_schema& b) {
  if (a.defs_.size() != b.defs_.size()) return false;
  for (std::size_t i = 0; i < a.defs_.size(); ++i) {
    const auto& x = a.defs_[i];
    const auto& y = b.defs_[i];
    if (x.name != y.name || x.kind != y.kind || x.levels != y.levels ||
        x.missing_allowed != y.missing_allowed)
      return false;
  }
  return true;
}

std::vector<location> dataset::locations() const {
  std::vector<location> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.where());
  return out;
}

std::vector<double> dataset::targets() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.target) throw domain_error("site '" + r.site_id + "' has no target value");
    out.push_back(*r.target);
  }
  return out;
}

dataset dataset::subset(std::span<const std::size_t> rows) const {
  dataset out{schema, {}};
  out.records.reserve(rows.size());
  for (auto i : rows) out.records.push_back(records.at(i));
  return out;
}

dataset read_dataset(std::istream& in, const covariate_schema& schema, load_mode mode) {
  csv::reader reader(in);
  auto header = reader.next();
  if (!header) throw schema_error("site file is empty");

  constexpr std::size_t absent = static_cast<std::size_t>(-1);
  std::size_t col_id = absent, col_x = absent, col_y = absent, col_target = absent;
  std::vector<std::size_t> col_of_cov(schema.size(), absent);
  const auto& names = header->fields;
  for (std::size_t c = 0; c < names.size(); ++c) {
    const auto& n = names[c];
    std::size_t* slot = nullptr;
    if (n == "site_id") slot = &col_id;
    else if (n == "x_km") slot = &col_x;
    else if (n == "y_km") slot = &col_y;
    else if (n == "target") slot = &col_target;
    else if (auto idx = schema.index_of(n)) slot = &col_of_cov[*idx];
    else throw schema_error("unknown column '" + n + "'");
    if (*slot != absent) throw schema_error("column '" + n + "' appears twice");
    *slot = c;
  }
  if (col_id == absent || col_x == absent || col_y == absent)
    throw schema_error("site file needs columns site_id, x_km, y_km");
  if (col_target == absent && mode == load_mode::fit)
    throw schema_error("site file needs a target column");
  for (std::size_t k = 0; k < schema.size(); ++k)
    if (col_of_cov[k] == absent) throw schema_error("covariate column '" + schema[k].name + "' missing");

  dataset out{schema, {}};
  std::unordered_set<std::string> ids;
  while (auto r = reader.next()) {
    const auto& f = r->fields;
    if (f.size() != names.size())
      throw parse_error(fmt::format("expected {} fields, found {}", names.size(), f.size()), r->line);

    site_record rec;
    rec.site_id = f[col_id];
    if (rec.site_id.empty()) throw parse_error("empty site_id", r->line);
    if (!ids.insert(rec.site_id).second)
      throw duplicate_id_error(fmt::format("line {}: duplicate site_id '{}'", r->line, rec.site_id));

    auto x = csv::parse_double(f[col_x]);
    auto y = csv::parse_double(f[col_y]);
    if (!x || !y) throw parse_error("coordinates must be numbers", r->line);
    if (!std::isfinite(*x) || !std::isfinite(*y))
      throw validation_error(fmt::format("line {}: coordinates must be finite", r->line));
    rec.x_km = *x;
    rec.y_km = *y;

    if (col_target != absent && !f[col_target].empty()) {
      auto t = csv::parse_double(f[col_target]);
      if (!t) throw parse_error("target is not a number", r->line);
      if (!(*t > 0.0) || !std::isfinite(*t))
        throw validation_error(fmt::format("line {}: target must be positive, got {}", r->line, *t));
      rec.target = *t;
    } else if (mode == load_mode::fit) {
      throw validation_error(fmt::format("line {}: missing target", r->line));
    }

    rec.covariates.resize(schema.size(), missing_value);
    for (std::size_t k = 0; k < schema.size(); ++k) {
      const auto& def = schema[k];
      const auto& cell = f[col_of_cov[k]];
      if (cell.empty()) {
        if (!def.missing_allowed)
          throw validation_error(fmt::format("line {}: covariate '{}' may not be missing", r->line, def.name));
        continue;
      }
      if (def.kind == covariate_kind::numeric) {
        auto v = csv::parse_double(cell);
        if (!v || std::isnan(*v))
          throw parse_error(fmt::format("covariate '{}' is not a number", def.name), r->line);
        rec.covariates[k] = *v;
      } else if (auto code = schema.level_code(k, cell)) {
        rec.covariates[k] = *code;
      } else if (mode == load_mode::fit) {
        throw validation_error(
            fmt::format("line {}: level '{}' not declared for covariate '{}'", r->line, cell, def.name));
      }
    }
    out.records.push_back(std::move(rec));
  }
  return out;
}

dataset load_dataset(const std::filesystem::path& path, const covariate_schema& schema, load_mode mode) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open site file " + path.string());
  return read_dataset(in, schema, mode);
}

void write_dataset(std::ostream& out, const dataset& data) {
  out << "site_id,x_km,y_km,target";
  for (const auto& d : data.schema.defs()) out << ',' << csv::escape(d.name);
  out << '\n';
  for (const auto& r : data.records) {
    out << csv::escape(r.site_id) << ',' << csv::format_exact(r.x_km) << ','
        << csv::format_exact(r.y_km) << ',';
    if (r.target) out << csv::format_exact(*r.target);
    for (std::size_t k = 0; k < data.schema.size(); ++k) {
      out << ',';
      const double v = r.covariates[k];
      if (is_missing(v)) continue;
      if (data.schema[k].kind == covariate_kind::numeric)
        out << csv::format_exact(v);
      else
        out << csv::escape(data.schema[k].levels.at(static_cast<std::size_t>(v)));
    }
    out << '\n';
  }
}

std::vector<std::string> scan_levels(const std::filesystem::path& path, std::string_view column) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open site file " + path.string());
  csv::reader reader(in);
  auto header = reader.next();
  if (!header) throw schema_error("site file is empty");
  auto it = std::find(header->fields.begin(), header->fields.end(), column);
  if (it == header->fields.end()) throw schema_error("column '" + std::string(column) + "' not found");
  const auto col = static_cast<std::size_t>(it - header->fields.begin());
  std::set<std::string> levels;
  while (auto r = reader.next()) {
    if (col < r->fields.size() && !r->fields[col].empty()) levels.insert(r->fields[col]);
  }
  return {levels.begin(), levels.end()};
}

std::vector<double> log_transform(std::span<const double> targets) {
  std::vector<double> z;
  z.reserve(targets.size());
  for (double y : targets) {
    if (!(y > 0.0) || !std::isfinite(y))
      throw domain_error(fmt::format("log transform needs positive targets, got {}", y));
    z.push_back(std::log(y));
  }
  return z;
}

std::vector<double> log_transform(const dataset& data) { return log_transform(data.targets()); }

}  // namespace socmap::ingest
