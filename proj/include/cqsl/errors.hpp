#pragma once

#include <stdexcept>
#include <string>

namespace cqsl {

// Base for every error raised by the library. Each subclass marks one
// failure mode so callers (and the CLI exit-code logic) can tell them apart.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class NonHermitianInput : public Error {
public:
  using Error::Error;
};

class ParamOutOfRange : public Error {
public:
  using Error::Error;
};

class PositivityViolation : public Error {
public:
  using Error::Error;
};

class PoleEncountered : public Error {
public:
  using Error::Error;
};

class DegeneratePurity : public Error {
public:
  using Error::Error;
};

class QuadratureNonConvergent : public Error {
public:
  using Error::Error;
};

class StepTooLarge : public Error {
public:
  using Error::Error;
};

} // namespace cqsl
