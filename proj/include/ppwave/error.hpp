#pragma once

#include <stdexcept>
#include <string>

namespace ppwave {

enum class ErrorKind {
  Usage,         // bad arguments / malformed input files
  Syntax,        // expression text does not match the grammar
  Domain,        // evaluation hit ln(<=0) or division by zero
  Precondition,  // operation called outside its contract
  Numeric,       // singular metric, ODE failure, non-finite data
  Budget,        // configured evaluation cap exceeded
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace ppwave
