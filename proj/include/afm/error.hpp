#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afm {

enum class ErrorCode {
  Domain,
  UnsupportedReduction,
  InconsistentFamily,
  InversionFailed,
  Degenerate,
  NoMinimum,
  FallingToCenter,
  Convergence,
  IncompleteTable,
  FitFailed,
  InvalidConfig,
  Parse,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries the module that detected it
// and a stable code; what() reads "<module>.<code>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string module, ErrorCode code, const std::string& message);

  const std::string& module() const noexcept { return module_; }
  ErrorCode code() const noexcept { return code_; }
  std::string qualified_code() const;

 private:
  std::string module_;
  ErrorCode code_;
};

}  // namespace afm
