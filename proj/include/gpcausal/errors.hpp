#pragma once

#include <stdexcept>
#include <string>

namespace gpcausal {

// Exit-code mapping for the CLI: DataError -> 2, NumericError -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct NotPositiveDefiniteError : NumericError {
  NotPositiveDefiniteError(const std::string& msg, double attempted_jitter)
      : NumericError(msg), attempted_jitter(attempted_jitter) {}
  double attempted_jitter;
};

}  // namespace gpcausal
