#pragma once

#include <stdexcept>
#include <string>

namespace ppens {

/// Base class for every error raised by the library. `module()` names the
/// subsystem that failed so front ends can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error("geometry", what) {}
};

class LinearAlgebraError : public Error {
 public:
  explicit LinearAlgebraError(const std::string& what) : Error("sparsela", what) {}
};

class PoissonError : public Error {
 public:
  explicit PoissonError(const std::string& what) : Error("poisson", what) {}
};

class MomentumError : public Error {
 public:
  explicit MomentumError(const std::string& what) : Error("momentum", what) {}
};

/// Raised when the explicit march produces a non-finite value.
class InstabilityError : public Error {
 public:
  InstabilityError(long step, const std::string& what)
      : Error("stepper", "instability at step " + std::to_string(step) + ": " + what),
        step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// Invalid user input (bad configuration, precondition violations).
class ConfigError : public Error {
 public:
  ConfigError(std::string module, const std::string& what) : Error(std::move(module), what) {}
};

}  // namespace ppens
