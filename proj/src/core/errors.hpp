#pragma once

#include <stdexcept>
#include <string>

namespace kropina {

enum class ErrorKind {
  input,          // malformed or non-finite arguments
  domain,         // point outside the chart's validity region
  outside_cone,   // tangent vector outside the conic domain A_x
  near_boundary,  // inside A_x but too close to its boundary for the operation
  degenerate,     // degenerate plane or flag
  validation,     // model data violates a structural identity
  sampling,       // random sampler could not find admissible samples
  config,         // run configuration rejected
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct InputError : Error {
  explicit InputError(const std::string& w) : Error(ErrorKind::input, w) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& w) : Error(ErrorKind::domain, w) {}
};
struct OutsideConeError : Error {
  explicit OutsideConeError(const std::string& w) : Error(ErrorKind::outside_cone, w) {}
};
struct NearBoundaryError : Error {
  explicit NearBoundaryError(const std::string& w) : Error(ErrorKind::near_boundary, w) {}
};
struct DegenerateError : Error {
  explicit DegenerateError(const std::string& w) : Error(ErrorKind::degenerate, w) {}
};
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorKind::validation, w) {}
};
struct SamplingError : Error {
  explicit SamplingError(const std::string& w) : Error(ErrorKind::sampling, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

}  // namespace kropina
