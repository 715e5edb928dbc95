#pragma once

#include <stdexcept>
#include <string>

namespace threatnet {

/// Exit-code class carried by every toolkit exception.
enum class ErrorKind {
  usage = 1,       // bad input, bad config, I/O
  numerical = 2,   // solver or eigensolver failure
  validation = 3,  // invariant check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(ErrorKind::numerical, what), residual_(residual) {}
  /// Last residual reached before giving up.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace threatnet
