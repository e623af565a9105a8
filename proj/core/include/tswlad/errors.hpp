#pragma once

#include <stdexcept>
#include <string>

namespace tswlad {

/// Invalid configuration: a constraint on the problem setup is violated.
/// Messages name the violated assumption where one applies.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent external data (dataset rows, schemas).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to converge or produced an invalid state.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace tswlad
