#pragma once

#include <stdexcept>
#include <string>

namespace gre {

/// Base class for domain errors raised by the library. The CLI maps these to
/// exit status 1 and reports `kind()` in its structured error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension_mismatch", m) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& m) : Error("invalid_argument", m) {}
};

/// K_e could not be factorised even after the nugget was escalated to its cap.
class IllConditionedError : public Error {
 public:
  IllConditionedError(const std::string& m, std::size_t first, std::size_t second)
      : Error("ill_conditioned", m), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_, second_;
};

class DegenerateBasisError : public Error {
 public:
  explicit DegenerateBasisError(const std::string& m) : Error("degenerate_basis", m) {}
};

class OffGridError : public Error {
 public:
  explicit OffGridError(const std::string& m) : Error("off_grid_index", m) {}
};

class SimulatorError : public Error {
 public:
  SimulatorError(const std::string& m, std::string output)
      : Error("simulator_failure", m), output_(std::move(output)) {}
  const std::string& output() const noexcept { return output_; }

 private:
  std::string output_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error("parse_error", m) {}
};

}  // namespace gre
