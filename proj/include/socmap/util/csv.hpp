#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socmap::csv {

struct row {
  std::size_t line = 0;  // 1-based line number in the source
  std::vector<std::string> fields;
};

// Reads comma-separated records. Double-quoted fields may contain commas and
// doubled quotes; embedded newlines are not supported. Blank lines are skipped.
class reader {
 public:
  explicit reader(std::istream& in) : in_(in) {}

  std::optional<row> next();

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

std::vector<std::string> split_line(std::string_view line, std::size_t line_number);

std::string escape(std::string_view field);

// Shortest text that parses back to the same double.
std::string format_exact(double value);

// Fixed significant-digit rendering used in reports.
std::string format_report(double value);

// Parses a whole field as a double; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

}  // namespace socmap::csv
