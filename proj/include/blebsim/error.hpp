#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace blebsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user configuration or out-of-range parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A data structure violates one of its invariants; the message names it.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Linear solver failure. Carries the residual history for diagnostics.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history = {})
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }
  double final_residual() const noexcept { return history_.empty() ? -1.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace blebsim
