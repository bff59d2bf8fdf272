#include "afm/error.hpp"

namespace afm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::UnsupportedReduction: return "unsupported-reduction";
    case ErrorCode::InconsistentFamily: return "inconsistent-family";
    case ErrorCode::InversionFailed: return "inversion-failed";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::NoMinimum: return "no-minimum";
    case ErrorCode::FallingToCenter: return "falling-to-center";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::IncompleteTable: return "incomplete-table";
    case ErrorCode::FitFailed: return "fit-failed";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

Error::Error(std::string module, ErrorCode code, const std::string& message)
    : std::runtime_error(module + "." + std::string(to_string(code)) + ": " + message),
      module_(std::move(module)),
      code_(code) {}

std::string Error::qualified_code() const {
  return module_ + "." + std::string(to_string(code_));
}

}  // namespace afm
