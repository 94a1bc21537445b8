#pragma once

#include <stdexcept>
#include <string>

namespace pivotmt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not conform for an op.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Normalizing a vector whose norm is at or below the degeneracy threshold.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (non-scalar loss, empty sequence, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value or combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The requested operation is not available for this model topology.
class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

// Artifacts that do not belong together, e.g. a checkpoint and a corpus
// whose vocabularies differ.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Optimization diverged (non-finite loss or gradient).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace pivotmt
