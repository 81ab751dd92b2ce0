// circuit_sched: run relay circuit-scheduling scenarios and emit CSV results.

#include <CLI11.hpp>

#include <iostream>

#include "circsched/commands.hpp"

int main(int argc, char** argv) {
  using namespace circsched;

  CLI::App app{"Discrete-time relay circuit scheduling simulator"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config;
  std::string out_dir = "out";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config, "Scenario file (YAML); built-in defaults when omitted");
    cmd->add_option("--scheduler", opts.scheduler, "Scheduler: rr, ewma, arpf or optpf");
    cmd->add_option("--seed", opts.seed, "Seed (overrides sim.seed and run.seeds)");
    cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
    cmd->add_option("--max-ticks", opts.max_ticks, "Tick limit per run");
  };

  auto* simulate = app.add_subcommand("simulate", "Run one scenario with one scheduler");
  auto* compare = app.add_subcommand("compare", "Run every scheduler on every seed");
  auto* sweep = app.add_subcommand("sweep", "Sweep the number of multiplexed circuits");
  for (auto* cmd : {simulate, compare, sweep}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (!config.empty()) opts.config = config;
  opts.out_dir = out_dir;

  if (simulate->parsed()) return cmd_simulate(opts, std::cerr);
  if (compare->parsed()) return cmd_compare(opts, std::cerr);
  return cmd_sweep(opts, std::cerr);
}
