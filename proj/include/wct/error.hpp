#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wct {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inputs outside an operation's domain (bad parameters, misaligned data).
class DomainError : public Error {
 public:
  using Error::Error;
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
  using Error::Error;
};

/// Operation only defined for a particular exponent (adjoint, PSD oracle: p = 2).
class UnsupportedExponentError : public Error {
 public:
  using Error::Error;
};

/// Dense realizations are capped; exceeding the cap is an error, never a silent subsample.
class SizeError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace wct
