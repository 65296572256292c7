#include <iostream>

#include <CLI11.hpp>

#include "kplateau_app/app.hpp"

int main(int argc, char** argv) {
  using namespace kplateau::app;
  CLI::App cli{"Plateau problems for hypersurfaces of constant Gauss curvature"};
  cli.set_version_flag("--version", version_string());
  cli.require_subcommand(1);

  RunOptions opts;
  std::uint64_t seed = 0;
  std::string command;
  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Dirichlet problem for a prescribed-curvature graph"},
      {"plateau", "Volume-minimising Plateau loop with a frozen boundary set"},
      {"suite", "Randomised geometry and duality property suite"},
      {"study", "Mesh-refinement convergence study"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = cli.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Scenario file (TOML unless --json)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed recorded in every artifact (overrides the config)");
    sub->add_option("--threads", opts.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_flag("--json", opts.json, "Read the config as JSON");
    sub->callback([&command, name = std::string(name)] { command = name; });
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return exit_parse;
  }
  for (auto* sub : cli.get_subcommands())
    if (sub->count("--seed")) opts.seed = seed;

  opts.log = &std::cerr;
  opts.human = &std::cout;
  return run(command, opts).exit_code;
}
