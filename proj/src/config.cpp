#include "stefan/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "stefan/io.hpp"

namespace stefan {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 7> kCommandNames{"solve", "pde", "compare", "field", "jump", "onephase", "selftest"};

double as_number(const json& v, const std::string& key) {
  require(v.is_number(), ErrorCode::type_mismatch, "'" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& key) {
  require(v.is_number_integer(), ErrorCode::type_mismatch, "'" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

int as_count(const json& v, const std::string& key) {
  const std::int64_t n = as_integer(v, key);
  require(n > 0 && n <= 1'000'000'000, ErrorCode::config_invalid, "'" + key + "' must be a positive count");
  return static_cast<int>(n);
}

std::string as_string(const json& v, const std::string& key) {
  require(v.is_string(), ErrorCode::type_mismatch, "'" + key + "' must be a string");
  return v.get<std::string>();
}

double positive(double x, const std::string& key) {
  require(std::isfinite(x) && x > 0.0, ErrorCode::config_invalid, "'" + key + "' must be positive");
  return x;
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"command",
       [](RunConfig& c, const json& v) {
         const std::string name = as_string(v, "command");
         c.command = parse_command(name);
         require(c.command.has_value(), ErrorCode::config_invalid, "unknown command '" + name + "'");
       }},
      {"initial_data",
       [](RunConfig& c, const json& v) {
         require(v.is_string() || v.is_object(), ErrorCode::type_mismatch,
                 "'initial_data' must be a file path or an object");
         c.initial_data = v;
       }},
      {"horizon", [](RunConfig& c, const json& v) { c.horizon = positive(as_number(v, "horizon"), "horizon"); }},
      {"time_nodes",
       [](RunConfig& c, const json& v) {
         c.time_nodes = as_count(v, "time_nodes");
         require(c.time_nodes >= 2, ErrorCode::config_invalid, "'time_nodes' must be at least 2");
       }},
      {"field_nodes", [](RunConfig& c, const json& v) { c.field_nodes = as_count(v, "field_nodes"); }},
      {"bins", [](RunConfig& c, const json& v) { c.bins = as_count(v, "bins"); }},
      {"n_paths",
       [](RunConfig& c, const json& v) {
         c.n_paths = as_integer(v, "n_paths");
         require(c.n_paths > 0, ErrorCode::config_invalid, "'n_paths' must be positive");
       }},
      {"seed",
       [](RunConfig& c, const json& v) {
         require(v.is_number_integer(), ErrorCode::type_mismatch, "'seed' must be an unsigned 64-bit integer");
         require(v.is_number_unsigned(), ErrorCode::config_invalid, "'seed' must be non-negative");
         c.seed = v.get<std::uint64_t>();
       }},
      {"tol_fp", [](RunConfig& c, const json& v) { c.tol_fp = positive(as_number(v, "tol_fp"), "tol_fp"); }},
      {"jump_tol", [](RunConfig& c, const json& v) { c.jump_tol = positive(as_number(v, "jump_tol"), "jump_tol"); }},
      {"quadrature_tol",
       [](RunConfig& c, const json& v) {
         c.quadrature_tol = positive(as_number(v, "quadrature_tol"), "quadrature_tol");
       }},
      {"max_step",
       [](RunConfig& c, const json& v) { c.max_step = positive(as_number(v, "max_step"), "max_step"); }},
      {"hysteresis",
       [](RunConfig& c, const json& v) {
         const double h = as_number(v, "hysteresis");
         require(h >= 0.0, ErrorCode::config_invalid, "'hysteresis' must be non-negative");
         c.hysteresis = h;
       }},
      {"max_iterations", [](RunConfig& c, const json& v) { c.max_iterations = as_count(v, "max_iterations"); }},
      {"field_times",
       [](RunConfig& c, const json& v) {
         require(v.is_array(), ErrorCode::type_mismatch, "'field_times' must be an array of numbers");
         c.field_times.clear();
         for (const json& t : v) {
           const double x = as_number(t, "field_times");
           require(x >= 0.0, ErrorCode::config_invalid, "'field_times' must be non-negative");
           c.field_times.push_back(x);
         }
       }},
      {"dx", [](RunConfig& c, const json& v) { c.dx = positive(as_number(v, "dx"), "dx"); }},
      {"dt", [](RunConfig& c, const json& v) { c.dt = positive(as_number(v, "dt"), "dt"); }},
      {"x_max", [](RunConfig& c, const json& v) { c.x_max = positive(as_number(v, "x_max"), "x_max"); }},
      {"field_file", [](RunConfig& c, const json& v) { c.field_file = as_string(v, "field_file"); }},
      {"lambda_left",
       [](RunConfig& c, const json& v) { c.lambda_left = positive(as_number(v, "lambda_left"), "lambda_left"); }},
      {"density",
       [](RunConfig& c, const json& v) {
         require(v.is_array(), ErrorCode::type_mismatch, "'density' must be an array of segments");
         c.density = v;
       }},
      {"q",
       [](RunConfig& c, const json& v) {
         c.q = as_number(v, "q");
         require(c.q > 0.0 && c.q <= 1.0, ErrorCode::config_invalid, "'q' must lie in (0, 1]");
       }},
      {"selftest_scale",
       [](RunConfig& c, const json& v) {
         c.selftest_scale = positive(as_number(v, "selftest_scale"), "selftest_scale");
       }},
      {"output_dir", [](RunConfig& c, const json& v) { c.output_dir = as_string(v, "output_dir"); }},
      {"workers",
       [](RunConfig& c, const json& v) {
         const int w = as_count(v, "workers");
         require(w <= 1024, ErrorCode::config_invalid, "'workers' must be at most 1024");
         c.workers = static_cast<unsigned>(w);
       }},
  };
  return table;
}

bool needs_horizon(Command c) {
  return c == Command::solve || c == Command::pde || c == Command::compare || c == Command::field ||
         c == Command::onephase;
}

}  // namespace

const char* command_name(Command c) { return kCommandNames[static_cast<std::size_t>(c)]; }

std::optional<Command> parse_command(const std::string& name) {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i)
    if (name == kCommandNames[i]) return static_cast<Command>(i);
  return std::nullopt;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::config_invalid, std::string("config is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), ErrorCode::type_mismatch, "config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    require(it != table.end(), ErrorCode::unknown_key, "unknown config key '" + key + "'");
    it->second(c, value);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), parent.empty() ? "." : parent.string());
}

void validate_config(const RunConfig& c) {
  require(c.command.has_value(), ErrorCode::missing_field, "no command given");
  require(c.seed.has_value(), ErrorCode::seed_required, "a seed is required; there is no implicit entropy");
  const Command cmd = *c.command;
  if (needs_horizon(cmd)) require(c.horizon.has_value(), ErrorCode::missing_field, "'horizon' is required");
  if (cmd == Command::onephase) {
    require(!c.density.is_null(), ErrorCode::missing_field, "'density' is required for onephase");
  } else if (cmd == Command::jump) {
    require(!c.initial_data.is_null() || (c.field_file && c.lambda_left), ErrorCode::missing_field,
            "jump needs 'initial_data' or both 'field_file' and 'lambda_left'");
  } else if (cmd != Command::selftest) {
    require(!c.initial_data.is_null(), ErrorCode::missing_field, "'initial_data' is required");
  }
  for (double t : c.field_times)
    require(!c.horizon || t <= *c.horizon, ErrorCode::config_invalid, "'field_times' must not exceed the horizon");
}

json config_to_json(const RunConfig& c) {
  json j;
  if (c.command) j["command"] = command_name(*c.command);
  if (!c.initial_data.is_null()) j["initial_data"] = c.initial_data;
  if (c.horizon) j["horizon"] = *c.horizon;
  j["time_nodes"] = c.time_nodes;
  j["field_nodes"] = c.field_nodes;
  j["bins"] = c.bins;
  j["n_paths"] = c.n_paths;
  if (c.seed) j["seed"] = *c.seed;
  j["tol_fp"] = c.tol_fp;
  j["jump_tol"] = c.jump_tol;
  j["quadrature_tol"] = c.quadrature_tol;
  if (c.max_step) j["max_step"] = *c.max_step;
  if (c.hysteresis) j["hysteresis"] = *c.hysteresis;
  j["max_iterations"] = c.max_iterations;
  j["field_times"] = c.field_times;
  j["dx"] = c.dx;
  if (c.dt) j["dt"] = *c.dt;
  if (c.x_max) j["x_max"] = *c.x_max;
  if (c.field_file) j["field_file"] = *c.field_file;
  if (c.lambda_left) j["lambda_left"] = *c.lambda_left;
  if (!c.density.is_null()) j["density"] = c.density;
  j["q"] = c.q;
  j["selftest_scale"] = c.selftest_scale;
  j["output_dir"] = c.output_dir;
  j["workers"] = c.workers;
  return j;
}

InitialData resolve_initial_data(const RunConfig& c) {
  require(!c.initial_data.is_null(), ErrorCode::missing_field, "'initial_data' is required");
  InitialData init = c.initial_data.is_string() ? load_initial_data(resolve_path(c, c.initial_data.get<std::string>()))
                                                : initial_data_from_json(c.initial_data);
  require_valid(init);
  return init;
}

std::string resolve_path(const RunConfig& c, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(c.base_dir) / p).string();
}

double effective_max_step(const RunConfig& c) {
  if (c.max_step) return *c.max_step;
  const double h = c.horizon.value_or(1.0);
  return std::min(h / (c.time_nodes - 1), h / 100.0);
}

}  // namespace stefan
