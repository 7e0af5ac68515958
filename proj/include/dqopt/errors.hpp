#pragma once

#include <stdexcept>
#include <string>

namespace dqopt {

// Raised when a configured iteration/retry budget runs out (maps to CLI exit 3).
struct budget_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for malformed scenario files or out-of-range settings (CLI exit 1).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dqopt
