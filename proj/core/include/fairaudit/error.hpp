#pragma once

#include <stdexcept>
#include <string>

namespace fairaudit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: unreadable files, schema violations, invalid requests.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation could not produce a trustworthy result (e.g. too many
/// degenerate bootstrap resamples).
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairaudit
