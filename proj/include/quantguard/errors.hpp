#pragma once

#include <stdexcept>
#include <string>

namespace quantguard {

// Error taxonomy mirroring the CLI exit codes:
//   0 ok, 2 usage, 3 math precondition, 4 data, 5 I/O.

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 2;
};

struct MathPreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 3;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 4;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
  static constexpr int exit_code = 5;
};

}  // namespace quantguard
