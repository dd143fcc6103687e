#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace equimid {

namespace detail {
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}
}  // namespace detail

/// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The minimizer of a closest-point search touched the search box boundary,
/// so the true minimum may lie outside.
class BoxTooSmall : public Error {
 public:
  using Error::Error;
};

/// The distance oracle could not produce a value even after box expansion.
class OracleFailure : public Error {
 public:
  using Error::Error;
};

class EmptyFamily : public Error {
 public:
  using Error::Error;
};

class GradientUnavailable : public Error {
 public:
  using Error::Error;
};

class NonDifferentiable : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// y^2 < |x - t|^2 while reconstructing the generating function.
class NegativeRadicand : public Error {
 public:
  using Error::Error;
};

/// |grad G| >= 1 where the Y field was requested.
class GradientBoundViolated : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Parse failure. `position` is a 0-based byte offset into the source and
/// `expected` lists what the parser would have accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string expected, const std::string& message)
      : Error(message + " at position " + std::to_string(position) + " (expected " + expected + ")"),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::string expected_;
};

}  // namespace equimid
