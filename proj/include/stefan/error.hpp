#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stefan {

enum class ErrorCode {
  domain_error,
  empty_mass,
  divergence,
  coverage,
  precondition,
  invalid_initial_data,
  config_invalid,
  unknown_key,
  type_mismatch,
  missing_field,
  seed_required,
  io,
};

/// Machine-readable name, e.g. "CONFIG_INVALID".
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace stefan
