#pragma once

#include <stdexcept>
#include <string>

namespace dikin {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point was passed where a strictly interior point is required.
class NotInterior : public Error {
public:
  using Error::Error;
};

/// Cholesky hit a non-positive pivot.
class FactorizationFailure : public Error {
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Within-chain variance vanished after rank normalization.
class ZeroVariance : public Error {
public:
  using Error::Error;
};

class TuningFailed : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

/// A ground-truth functional was requested for which no oracle exists.
class OracleUnavailable : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace dikin
