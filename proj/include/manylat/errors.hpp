#pragma once

#include <stdexcept>
#include <string>

namespace manylat {

// exit code 2
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// exit code 3: infeasible geometry or sector
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// exit code 4
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace manylat
