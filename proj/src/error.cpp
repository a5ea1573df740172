#include "stefan/error.hpp"

namespace stefan {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain_error: return "DOMAIN_ERROR";
    case ErrorCode::empty_mass: return "EMPTY_MASS";
    case ErrorCode::divergence: return "DIVERGENCE";
    case ErrorCode::coverage: return "COVERAGE";
    case ErrorCode::precondition: return "PRECONDITION";
    case ErrorCode::invalid_initial_data: return "INVALID_INITIAL_DATA";
    case ErrorCode::config_invalid: return "CONFIG_INVALID";
    case ErrorCode::unknown_key: return "UNKNOWN_KEY";
    case ErrorCode::type_mismatch: return "TYPE_MISMATCH";
    case ErrorCode::missing_field: return "MISSING_FIELD";
    case ErrorCode::seed_required: return "SEED_REQUIRED";
    case ErrorCode::io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace stefan
