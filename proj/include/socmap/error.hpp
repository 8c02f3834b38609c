#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socmap {

// Broad failure categories. The CLI maps each one to its own exit code.
enum class ErrorKind { config, data, numeric, validity };

class error : public std::runtime_error {
 public:
  error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class config_error : public error {
 public:
  explicit config_error(const std::string& what) : error(ErrorKind::config, what) {}
};

// A named covariate or model does not exist.
class lookup_error : public config_error {
 public:
  using config_error::config_error;
};

class data_error : public error {
 public:
  explicit data_error(const std::string& what) : error(ErrorKind::data, what) {}
};

class parse_error : public data_error {
 public:
  parse_error(const std::string& what, std::size_t line)
      : data_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class schema_error : public data_error {
 public:
  using data_error::data_error;
};

class validation_error : public data_error {
 public:
  using data_error::data_error;
};

class duplicate_id_error : public data_error {
 public:
  using data_error::data_error;
};

class coverage_error : public data_error {
 public:
  using data_error::data_error;
};

class domain_error : public data_error {
 public:
  using data_error::data_error;
};

class numeric_error : public error {
 public:
  explicit numeric_error(const std::string& what) : error(ErrorKind::numeric, what) {}
};

class degenerate_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class fit_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class validity_error : public error {
 public:
  explicit validity_error(const std::string& what) : error(ErrorKind::validity, what) {}
};

}  // namespace socmap
