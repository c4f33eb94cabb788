#pragma once

#include <stdexcept>
#include <string>

namespace chfem {

// Base error for all domain-level failures (preconditions, dimensions, solver breakdown).
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Configuration parse/validation failure; carries file/line context where known.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace chfem
