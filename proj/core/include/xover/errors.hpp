#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace xover {

// Base for all library errors.  `code()` is a stable machine-readable tag;
// `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what_arg)
      : std::runtime_error(what_arg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& w) : Error("invalid_input", w) {}
};

class SingularCovariance : public Error {
 public:
  explicit SingularCovariance(const std::string& w)
      : Error("singular_covariance", w) {}
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(const std::string& w) : Error("non_convergence", w) {}
};

class TargetOutOfRange : public Error {
 public:
  explicit TargetOutOfRange(const std::string& w)
      : Error("target_out_of_range", w) {}
};

class EmptyArm : public Error {
 public:
  explicit EmptyArm(const std::string& w) : Error("empty_arm", w) {}
};

class DegenerateVariance : public Error {
 public:
  explicit DegenerateVariance(const std::string& w)
      : Error("degenerate_variance", w) {}
};

class InfeasibleDesign : public Error {
 public:
  explicit InfeasibleDesign(const std::string& w)
      : Error("infeasible_design", w) {}
};

class InfeasibleCorrelation : public Error {
 public:
  explicit InfeasibleCorrelation(const std::string& w)
      : Error("infeasible_correlation", w) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& w) : Error("parse_error", w) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& w) : Error("config_error", w) {}
};

}  // namespace xover
