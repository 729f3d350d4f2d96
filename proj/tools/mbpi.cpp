#include <CLI11.hpp>

#include <iostream>

#include "mbpi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Critical Markov branching processes with immigration: experiment runner"};
  app.set_version_flag("--version", mbpi::tool_version());
  app.require_subcommand(1);

  mbpi::RunOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string config;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config, "config file (key=value with [section] headers)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
  run->add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = run->add_option("--seed", seed, "simulation seed (overrides [sim] seed)");
  run->add_flag("--strict", options.strict, "treat warnings as fatal");

  auto* list = app.add_subcommand("list-families", "list built-in law families and their conditions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mbpi::kExitConfig;
  }

  if (*list) {
    std::cout << mbpi::list_families();
    return 0;
  }
  if (!out_dir.empty()) options.out_dir = out_dir;
  if (*seed_opt) options.seed = seed;
  return mbpi::run_experiment(config, options, std::cout, std::cerr);
}
