#pragma once

#include <stdexcept>
#include <string>

namespace det4d {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveDepth : Error {
  using Error::Error;
};

struct EmptySet : Error {
  using Error::Error;
};

struct DimMismatch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// Malformed dataset document; the message carries the offending field path.
struct SchemaError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct InstanceMismatch : Error {
  using Error::Error;
};

struct PlacementFailure : Error {
  using Error::Error;
};

}  // namespace det4d
