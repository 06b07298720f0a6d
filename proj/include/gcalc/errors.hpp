#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcalc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class EvalError : public Error {
 public:
  EvalError(const std::string& what, double x)
      : Error(what + " at x=" + std::to_string(x)), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

/// Stencil system without a unique solution (duplicate abscissae, |f|=1 for
/// an arcsine linearization, ...).
class SingularStencil : public Error {
 public:
  using Error::Error;
};

/// Inverse-function linearization undefined (logarithm of zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A limit evaluation failed at one of its step sizes.
class StageError : public Error {
 public:
  StageError(const std::string& what, double delta)
      : Error(what + " (delta=" + std::to_string(delta) + ")"), delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class GridError : public Error {
 public:
  using Error::Error;
};

class NotIntegrable : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sampling too coarse or too short for the requested transform.
class AliasingError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcalc
