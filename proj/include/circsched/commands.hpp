#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "circsched/model.hpp"

namespace circsched {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Command-line overrides shared by all subcommands. Unset fields fall back
/// to the scenario file, and the scenario file to built-in defaults.
struct CommandOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::string> scheduler;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir = "out";
  std::optional<Tick> max_ticks;
};

/// Parallelism cap: CIRCUIT_SCHED_THREADS if set to a positive integer,
/// otherwise the hardware concurrency.
std::size_t thread_budget();

/// Runs job(0..count-1) on up to `threads` worker threads. The first
/// exception thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job);

/// One scenario with one scheduler: throughput.csv, latency.csv,
/// fairness.csv and resolved-config.yaml.
int cmd_simulate(const CommandOptions& opts, std::ostream& err);

/// Every configured scheduler on every seed: summary.csv,
/// plot_latency_cdf.dat and resolved-config.yaml.
int cmd_compare(const CommandOptions& opts, std::ostream& err);

/// Circuit-count sweep: sweep.csv, plot_jain.dat, plot_throughput.dat,
/// plot_latency_p50.dat and resolved-config.yaml.
int cmd_sweep(const CommandOptions& opts, std::ostream& err);

}  // namespace circsched
