#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace trustmarket {

enum class ErrorKind {
  InvalidArgument,
  UndefinedPosterior,
  DegeneratePolicy,
  InvalidStep,
  InfeasiblePoint,
  InvalidCommission,
  EmptyWindow,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the model library carries one of the kinds above so
// callers (the CLI in particular) can map them to exit codes.
class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace trustmarket
