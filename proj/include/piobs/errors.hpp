#pragma once

#include <stdexcept>
#include <string>

namespace piobs {

// Coarse failure classes. The CLI maps these onto its exit codes.
enum class ErrorKind {
  kInput,          // malformed data, violated preconditions, bad config
  kExistence,      // no observer of the requested form exists
  kCertification,  // numerically unreliable; the result was rejected
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::kInput, what) {}
};

// A modelling assumption on the plant does not hold (e.g. rank(C) < p).
class AssumptionError : public Error {
 public:
  explicit AssumptionError(const std::string& what)
      : Error(ErrorKind::kInput, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kInput, what) {}
};

class PoleSeparationError : public Error {
 public:
  explicit PoleSeparationError(const std::string& what)
      : Error(ErrorKind::kInput, what) {}
};

class SingularityError : public Error {
 public:
  explicit SingularityError(const std::string& what)
      : Error(ErrorKind::kCertification, what) {}
};

class NoUniqueSolutionError : public Error {
 public:
  explicit NoUniqueSolutionError(const std::string& what)
      : Error(ErrorKind::kCertification, what) {}
};

class ExistenceError : public Error {
 public:
  explicit ExistenceError(const std::string& what)
      : Error(ErrorKind::kExistence, what) {}
};

// Requested integrator dimension k exceeds q = rank(A12).
class OrderError : public ExistenceError {
 public:
  explicit OrderError(const std::string& what) : ExistenceError(what) {}
};

class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& what)
      : Error(ErrorKind::kCertification, what) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(ErrorKind::kCertification, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace piobs
