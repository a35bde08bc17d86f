#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace xorcop {

/// Base class for every domain or validation failure raised by the library.
/// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch between matrices, vectors, topologies or datasets.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A pivot fell below the singularity tolerance.
class SingularMatrixError : public Error {
public:
  using Error::Error;
};

/// The Gram matrix of a least-squares problem is not invertible.
class RankDeficientError : public SingularMatrixError {
public:
  using SingularMatrixError::SingularMatrixError;
};

/// A value lies outside its admissible range (e.g. a probability > 1).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Unknown identifier in a registry (dataset, baseline, activation ...).
class LookupError : public Error {
public:
  using Error::Error;
};

/// Expression references a variable with no binding.
class UnboundVariableError : public Error {
public:
  explicit UnboundVariableError(std::string name)
      : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

/// Syntax error in an expression, topology spec or CSV file.
///
/// `position` is a byte offset for expression/spec text and a 1-based line
/// number for CSV input; `expected` lists the tokens that would have been
/// accepted at that point (may be empty).
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position,
             std::vector<std::string> expected = {})
      : Error(what), position_(position), expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Requested "and" probability lies outside the Frechet bounds.
class InfeasibleError : public Error {
public:
  InfeasibleError(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

private:
  double lower_;
  double upper_;
};

/// Training blew up (non-finite loss or weights, or loss above the cap).
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

private:
  std::size_t iteration_;
};

/// collapse_linear was asked to fold a network with a non-identity layer.
class NotLinearError : public Error {
public:
  using Error::Error;
};

}  // namespace xorcop
