#pragma once

#include <stdexcept>
#include <string>

namespace agedecor {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfig : ConfigError {
  using ConfigError::ConfigError;
};

struct DegenerateAges : std::runtime_error {
  DegenerateAges() : std::runtime_error("all ages equal, cannot normalize") {}
};

struct InsufficientPool : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyLabelSubset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooFewRecords : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateDesign : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptySubset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingleClass : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoAgeSpread : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingResults : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  IoError(const std::string& what, const std::string& path)
      : std::runtime_error(what + ": " + path) {}
};

}  // namespace agedecor
