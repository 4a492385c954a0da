#pragma once

#include <stdexcept>
#include <string>

namespace sphpart {

// Base class of every error raised by the library. `kind()` is a short
// machine-readable tag used by the CLI error objects.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error("capacity", w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct SymmetryError : Error {
  explicit SymmetryError(const std::string& w) : Error("symmetry", w) {}
};
struct AssemblyError : Error {
  explicit AssemblyError(const std::string& w) : Error("assembly", w) {}
};
struct DomainTooThinError : Error {
  explicit DomainTooThinError(const std::string& w) : Error("domain-too-thin", w) {}
};
struct DegenerateVectorError : Error {
  explicit DegenerateVectorError(const std::string& w) : Error("degenerate-vector", w) {}
};
struct DegeneratePartitionError : Error {
  explicit DegeneratePartitionError(const std::string& w) : Error("degenerate-partition", w) {}
};
struct SpectrumError : Error {
  explicit SpectrumError(const std::string& w) : Error("spectrum", w) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& w, double achieved)
      : Error("convergence", w), achieved_residual_(achieved) {}
  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  double achieved_residual_;
};

}  // namespace sphpart
