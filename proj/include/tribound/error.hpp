#pragma once

#include <stdexcept>
#include <string>

namespace tribound {

/// Base of every error raised by the library. The CLI maps each family to an
/// exit code (see tools/tribound.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments and malformed configuration (exit 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};
class InvalidEta : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class InvalidDensity : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class InvalidAlpha : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class InvalidT : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class InvalidParams : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class PaletteTooSmall : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class EmptyInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class InconsistentParams : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class ShapeMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Raised when x2 - x1 and x3 - x1 do not span a plane.
class DegenerateTriplet : public Error {
 public:
  using Error::Error;
};

// Classifier backend failures (exit 3).
class BackendError : public Error {
 public:
  using Error::Error;
};
class BackendUnavailable : public BackendError {
 public:
  using BackendError::BackendError;
};
class TransportError : public BackendError {
 public:
  using BackendError::BackendError;
};
/// A tabulated oracle was queried with an input it has no label for.
class ReplayMiss : public BackendError {
 public:
  using BackendError::BackendError;
};

/// Pool too small, missing, or lacking class diversity (exit 4).
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// Calibration needs both clean and backdoored scores (exit 5).
class SingleClassInput : public Error {
 public:
  using Error::Error;
};

/// Zoo manifest lacks clean or backdoored models (exit 6).
class MissingClass : public Error {
 public:
  using Error::Error;
};

}  // namespace tribound
