#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "stefan/config.hpp"
#include "stefan/io.hpp"
#include "stefan/run.hpp"

using namespace stefan;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stefan_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::io;
}

}  // namespace

TEST_CASE("minimal config fills defaults and round-trips") {
  const RunConfig c = parse_config(R"({"command": "solve", "initial_data": "x.json", "horizon": 0.1, "seed": 3})");
  validate_config(c);
  CHECK(c.time_nodes == 51);
  CHECK(c.n_paths == 100000);
  CHECK(c.workers == 1u);
  const nlohmann::json j = config_to_json(c);
  CHECK(config_to_json(parse_config(j.dump())) == j);
}

TEST_CASE("config errors carry their codes") {
  CHECK(code_of(R"({"command": "solve", "fooo": 1})") == ErrorCode::unknown_key);
  CHECK(code_of(R"({"command": "solve", "initial_data": "x.json", "horizon": 0.1})") == ErrorCode::seed_required);
  CHECK(code_of(R"({"command": "solve", "n_paths": -5, "seed": 1})") == ErrorCode::config_invalid);
  CHECK(code_of(R"({"command": "solve", "horizon": "long", "seed": 1})") == ErrorCode::type_mismatch);
  CHECK(code_of(R"({"command": "solve", "seed": 1})") == ErrorCode::missing_field);
}

TEST_CASE("solve on the zero fixture") {
  const fs::path dir = scratch("zero");
  RunConfig c = parse_config(R"({"command": "solve", "horizon": 0.02, "time_nodes": 5, "n_paths": 2000, "seed": 1})");
  c.initial_data = std::string(STEFAN_DATA_DIR) + "/zero.json";
  c.output_dir = dir.string();
  std::ostringstream log;
  REQUIRE(run(c, log) == 0);
  std::ifstream in(dir / "lambda.csv");
  const Boundary b = read_boundary_csv(in);
  REQUIRE(b.size() == 5);
  for (double v : b.values) CHECK(v == 2.0);
}

TEST_CASE("same config and seed give byte-identical artifacts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  RunConfig c = parse_config(R"({"command": "solve", "horizon": 0.01, "time_nodes": 6, "n_paths": 9000, "seed": 5})");
  c.initial_data = std::string(STEFAN_DATA_DIR) + "/solid_bump.json";
  std::ostringstream log;
  c.output_dir = a.string();
  REQUIRE(run(c, log) == 0);
  c.output_dir = b.string();
  c.workers = 4;
  REQUIRE(run(c, log) == 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
  }
  CHECK(files >= 3);
}

TEST_CASE("command-line errors are JSON on stderr with a nonzero exit") {
  const fs::path dir = scratch("bad");
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"command": "solve", "initial_data": "zero.json", "horizon": 0.1, "n_paths": -1, "seed": 1})";
  }
  const std::string cmd = std::string(STEFAN_CLI_PATH) + " --config " + (dir / "bad.json").string() + " 2> " +
                          (dir / "err.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(status != 0);
  const auto err = nlohmann::json::parse(slurp(dir / "err.txt"));
  CHECK(err["error"]["code"] == "CONFIG_INVALID");

  const std::string ok = std::string(STEFAN_CLI_PATH) + " solve --config " + (dir / "missing.json").string() +
                         " 2> /dev/null";
  CHECK(std::system(ok.c_str()) != 0);
}
