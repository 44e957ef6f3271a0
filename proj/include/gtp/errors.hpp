#pragma once

#include <stdexcept>
#include <string>

namespace gtp {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Numerical machinery failed (bracketing, quadrature, eigen solve).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Eigenfunction series cannot reach the requested time with the cached zeros.
struct SeriesRegimeExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeometryError : std::runtime_error {
  enum class Kind { NotTouching, NonUniqueContact, Outside, Unsupported };
  GeometryError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct ConfigError : std::runtime_error {
  ConfigError(const std::string& msg, int line_no = 0)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + msg : msg),
        line(line_no) {}
  int line;
};

}  // namespace gtp
