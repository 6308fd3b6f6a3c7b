#pragma once

#include <stdexcept>
#include <string>

namespace arealaw {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Bad input: out-of-range interval, unknown family, missing parameter.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Something computed failed a numerical contract.
class NumericalError : public Error {
public:
  using Error::Error;
};

class BudgetError : public Error {
public:
  using Error::Error;
};

class DegenerateGroundState : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace arealaw
