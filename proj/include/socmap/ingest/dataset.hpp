#pragma once

#include <socmap/geometry.hpp>

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace socmap::ingest {

enum class covariate_kind { numeric, categorical };

struct covariate_def {
  std::string name;
  covariate_kind kind = covariate_kind::numeric;
  std::vector<std::string> levels;  // categorical only
  bool missing_allowed = true;
};

class covariate_schema {
 public:
  covariate_schema() = default;
  // Throws schema_error on duplicate names or empty level sets.
  explicit covariate_schema(std::vector<covariate_def> defs);

  std::size_t size() const noexcept { return defs_.size(); }
  const covariate_def& operator[](std::size_t i) const { return defs_[i]; }
  const std::vector<covariate_def>& defs() const noexcept { return defs_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<int> level_code(std::size_t column, std::string_view level) const;

  friend bool operator==(const covariate_schema&, const covariate_schema&);

 private:
  std::vector<covariate_def> defs_;
};

inline constexpr double missing_value = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Covariates are stored positionally against the dataset schema: numeric
// values as-is, categorical values as level codes, missing entries as NaN.
struct site_record {
  std::string site_id;
  double x_km = 0.0;
  double y_km = 0.0;
  std::optional<double> target;  // stock in kg/m2
  std::vector<double> covariates;

  location where() const { return {x_km, y_km}; }
};

struct dataset {
  covariate_schema schema;
  std::vector<site_record> records;

  std::size_t size() const noexcept { return records.size(); }
  std::vector<location> locations() const;
  // All targets; throws domain_error if any is absent.
  std::vector<double> targets() const;
  dataset subset(std::span<const std::size_t> rows) const;
};

// fit: every row needs a target. predict: targets optional, and categorical
// levels outside the schema are read as missing.
enum class load_mode { fit, predict };

dataset read_dataset(std::istream& in, const covariate_schema& schema, load_mode mode);
dataset load_dataset(const std::filesystem::path& path, const covariate_schema& schema,
                     load_mode mode);

// Header site_id,x_km,y_km,target then schema columns; numbers written exactly.
void write_dataset(std::ostream& out, const dataset& data);

// Sorted distinct non-empty values of a column in a site CSV; used to derive
// categorical level sets when a configuration leaves them out.
std::vector<std::string> scan_levels(const std::filesystem::path& path, std::string_view column);

// z = ln(target) for every record.
std::vector<double> log_transform(const dataset& data);
std::vector<double> log_transform(std::span<const double> targets);

}  // namespace socmap::ingest
