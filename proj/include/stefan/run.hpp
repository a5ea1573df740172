#pragma once

#include <iosfwd>
#include <string>

#include "stefan/config.hpp"

namespace stefan {

/// `field_<t>.csv` with t printed to 6 decimals.
std::string field_file_name(double t);

/// Dispatches the configured command and writes its artifacts into
/// config.output_dir. Returns the process exit status; progress goes to `log`.
int run(const RunConfig& config, std::ostream& log);

/// {"error": {"code": ..., "message": ...}}
std::string error_json(const std::string& code, const std::string& message);

}  // namespace stefan
