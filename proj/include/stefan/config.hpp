#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "stefan/core.hpp"

namespace stefan {

enum class Command { solve, pde, compare, field, jump, onephase, selftest };
const char* command_name(Command c);
std::optional<Command> parse_command(const std::string& name);

/// Everything a run needs. Paths are resolved against base_dir.
struct RunConfig {
  std::optional<Command> command;
  nlohmann::json initial_data;       // file path (string) or inline object
  std::optional<double> horizon;
  int time_nodes = 51;
  int field_nodes = 41;
  int bins = 20;
  std::int64_t n_paths = 100000;
  std::optional<std::uint64_t> seed;
  double tol_fp = 1e-7;
  double jump_tol = 1e-10;           // relative to Λ0-^3
  double quadrature_tol = 1e-8;
  std::optional<double> max_step;    // δ; default min(grid spacing, horizon / 100)
  std::optional<double> hysteresis;  // ε_h; default 4 × field standard error
  int max_iterations = 100;
  std::vector<double> field_times;   // default {horizon / 2}
  double dx = 1e-3;
  std::optional<double> dt;          // default dx^2
  std::optional<double> x_max;       // default Λ0- + 8 √horizon
  std::optional<std::string> field_file;
  std::optional<double> lambda_left;
  nlohmann::json density;            // one-phase sub-density segments
  double q = 0.25;
  double selftest_scale = 1.0;
  std::string output_dir = "out";
  unsigned workers = 1;
  std::string base_dir = ".";
};

/// Strict parse: unknown keys, wrong types, missing required fields and bad
/// values each raise their own error code. The seed check is left to
/// validate_config so a command-line seed can fill it in.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Checks requirements that depend on the command and on overrides.
void validate_config(const RunConfig& config);

/// Full serialization, defaults included.
nlohmann::json config_to_json(const RunConfig& config);

InitialData resolve_initial_data(const RunConfig& config);
std::string resolve_path(const RunConfig& config, const std::string& path);
double effective_max_step(const RunConfig& config);

}  // namespace stefan
