#pragma once

#include <stdexcept>
#include <string>

namespace brandsim {

enum class ErrorKind {
  kIo,               // file missing or unreadable
  kParse,            // malformed input record
  kValidation,       // a data invariant is violated
  kDimension,        // vector length does not match the expected dimension
  kInvalidArgument,  // bad parameter or unknown identifier
  kUndefined,        // statistic undefined for the input (constant vector, zero mass)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace brandsim
