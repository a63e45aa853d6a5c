#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace assertgen {

/// Bad or missing user input (files, flags, empty corpora). CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf during training or inference. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checkpoint or artifact failed its integrity check. CLI exit code 4.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace assertgen
