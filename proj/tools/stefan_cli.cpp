#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stefan/config.hpp"
#include "stefan/error.hpp"
#include "stefan/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-phase radial Stefan problem with surface tension"};
  std::string command, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  app.add_option("command", command, "solve | pde | compare | field | jump | onephase | selftest");
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "overrides the config seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 1024u));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << stefan::error_json("CONFIG_INVALID", e.what()) << '\n';
    return 2;
  }

  try {
    stefan::RunConfig config = config_path.empty() ? stefan::RunConfig{} : stefan::load_config(config_path);
    if (!command.empty()) {
      config.command = stefan::parse_command(command);
      stefan::require(config.command.has_value(), stefan::ErrorCode::config_invalid, "unknown command '" + command + "'");
    }
    if (seed) config.seed = *seed;
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (workers) config.workers = *workers;
    return stefan::run(config, std::cout);
  } catch (const stefan::Error& e) {
    std::cerr << stefan::error_json(std::string(stefan::error_code_name(e.code())), e.what()) << '\n';
  } catch (const std::exception& e) {
    std::cerr << stefan::error_json("INTERNAL", e.what()) << '\n';
  }
  return 1;
}
