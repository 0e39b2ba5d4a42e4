#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace osc {

/// Broad failure class, used by the CLI to emit a machine-parsable category.
enum class ErrorCategory {
  kConfig,        // invalid parameter value or config file
  kIo,            // missing / unreadable / unwritable file
  kFormat,        // file present but malformed
  kPrecondition,  // inputs violate an operation's precondition
};

std::string_view CategoryName(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

}  // namespace osc
