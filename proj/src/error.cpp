#include "trustmarket/error.hpp"

namespace trustmarket {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UndefinedPosterior: return "UndefinedPosterior";
    case ErrorKind::DegeneratePolicy: return "DegeneratePolicy";
    case ErrorKind::InvalidStep: return "InvalidStep";
    case ErrorKind::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorKind::InvalidCommission: return "InvalidCommission";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
  }
  return "Unknown";
}

}  // namespace trustmarket
