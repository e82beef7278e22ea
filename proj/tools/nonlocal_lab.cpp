// nonlocal_lab: run a JSON-configured experiment or list the built-in fixtures.
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nlab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sobolev cut norms, nonlocal energies and their convergence experiments"};
  app.require_subcommand(1);

  std::string config;
  CLI::App* run = app.add_subcommand("run", "run the command described by a JSON config");
  run->add_option("config", config, "path to the config file")->required();
  app.add_subcommand("list", "list fixture and family ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nlab::cli::kExitConfigError;
  }

  if (*run) return nlab::cli::run(config, std::cout, std::cerr);
  std::cout << nlab::cli::fixtures_table();
  return 0;
}
