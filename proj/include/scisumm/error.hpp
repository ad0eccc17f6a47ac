#pragma once

#include <stdexcept>
#include <string>

namespace scisumm {

/// Bad invocation: unknown option, invalid parameter value.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot be processed: malformed files, mismatched ids,
/// empty corpora.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace scisumm
