// Experiment runner: one JSON config in, CSV tables and a JSON summary out.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "manylat/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lattice many-body experiment runner"};
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  long realizations_override = 0;
  int threads_override = 0;
  app.add_option("config", config_path, "path to the JSON experiment config")->required();
  app.add_option("--seed", seed_override, "override the master seed");
  app.add_option("--out", out_override, "override the output root directory");
  app.add_option("--realizations", realizations_override, "override the realization count");
  app.add_option("--threads", threads_override, "override the worker count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::ifstream in(config_path);
    if (!in) throw manylat::ConfigError("cannot open config file " + config_path);
    manylat::json cfg;
    try {
      cfg = manylat::json::parse(in);
    } catch (const manylat::json::exception& e) {
      throw manylat::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) throw manylat::ConfigError("config must be a JSON object");
    if (seed_override != 0) cfg["seed"] = seed_override;
    if (!out_override.empty()) cfg["out"] = out_override;
    if (realizations_override != 0) cfg["realizations"] = realizations_override;
    if (threads_override != 0) cfg["threads"] = threads_override;

    manylat::RunOutcome outcome = manylat::run_experiment(cfg);
    std::cout << "wrote " << outcome.dir << "/summary.json\n";
    return 0;
  } catch (const manylat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const manylat::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return 3;
  } catch (const manylat::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
