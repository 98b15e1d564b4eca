#pragma once

#include <stdexcept>
#include <string>

namespace torsionlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain, grid, or potential parameters.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A field, measure, or operator was combined with one built on another grid.
class GridMismatch : public Error {
 public:
  GridMismatch() : Error("grid mismatch: operands were built on different grids") {}
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve or eigen-solve did not reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace torsionlab
