#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "fgp/profiles.hpp"
#include "fgp/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fgp: Gaussian-process fractal geometry laboratory"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "override the config seed");

  std::string config_path;
  std::string output_dir = ".";
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("-o,--output", output_dir, "output directory");

  auto* profiles = app.add_subcommand("profiles", "list built-in profile kinds");

  CLI11_PARSE(app, argc, argv);

  if (profiles->parsed()) {
    std::fputs(fgp::profile_catalog().c_str(), stdout);
    return 0;
  }
  const fgp::RunOutcome out =
      fgp::run_experiment_file(config_path, output_dir, seed);
  if (out.exit_code != 0) std::fprintf(stderr, "fgp: %s\n", out.message.c_str());
  return out.exit_code;
}
