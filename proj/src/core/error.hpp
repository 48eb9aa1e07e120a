#pragma once

#include <stdexcept>
#include <string>

namespace cmcert {

enum class ErrorCode {
  kInvalidArgument,
  kConfig,
  kInfeasible,
  kAssumptionViolated,
  kTopologyMismatch,
  kIo,
  kDiverged,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

/// No gain below the configured ceiling admits LMI witnesses.
class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what)
      : Error(ErrorCode::kInfeasible, what) {}
};

class AssumptionViolated : public Error {
 public:
  explicit AssumptionViolated(const std::string& what)
      : Error(ErrorCode::kAssumptionViolated, what) {}
};

class TopologyMismatch : public Error {
 public:
  explicit TopologyMismatch(const std::string& what)
      : Error(ErrorCode::kTopologyMismatch, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// Malformed or inconsistent run configuration; the message names the line.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCode::kConfig, what) {}
};

class Diverged : public Error {
 public:
  explicit Diverged(const std::string& what)
      : Error(ErrorCode::kDiverged, what) {}
};

}  // namespace cmcert
