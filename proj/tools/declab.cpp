// declab: run or validate a scenario file.
//
//   declab run --config scenario.cfg [--out DIR]
//   declab validate --config scenario.cfg
//
// Exit status: 0 success, 1 invalid configuration, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "declab/cli/config.hpp"
#include "declab/cli/run.hpp"
#include "declab/error.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw declab::cli::ConfigError(declab::cli::ConfigError::Kind::Parse, "--config", 0, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"declab: decoherence and superselection experiments"};
  app.set_version_flag("--version", DECLAB_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;

  CLI::App* run = app.add_subcommand("run", "Run a scenario and write its CSV and report");
  run->add_option("--config", config_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Directory for the outputs (overrides output.* paths)");

  CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario without running it");
  validate->add_option("--config", config_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  declab::cli::ScenarioConfig cfg;
  try {
    cfg = declab::cli::parse_config(read_file(config_path));
  } catch (const declab::cli::ConfigError& e) {
    std::cerr << "declab: " << config_path << ": " << e.what() << "\n";
    return kExitValidation;
  }

  if (validate->parsed()) {
    std::cout << config_path << ": ok (" << declab::cli::to_string(cfg.experiment) << ")\n";
    return 0;
  }

  try {
    std::optional<std::filesystem::path> out;
    if (!out_dir.empty()) out = out_dir;
    const auto report = declab::cli::run_scenario(cfg, out);
    std::cout << report.csv_path.string() << " (" << report.rows << " rows)\n" << report.report_path.string() << "\n";
  } catch (const declab::Error& e) {
    std::cerr << "declab: " << declab::to_string(e.code()) << ": " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "declab: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
