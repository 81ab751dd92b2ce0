#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "circsched/engine.hpp"
#include "circsched/model.hpp"
#include "circsched/sched.hpp"
#include "circsched/traffic.hpp"

namespace circsched {

/// One `circuits:` entry: a workload replicated `count` times.
struct CircuitGroup {
  WorkloadSpec workload;
  std::uint32_t count = 1;
  bool operator==(const CircuitGroup&) const = default;
};

struct SweepRange {
  std::uint32_t from = 6;
  std::uint32_t to = 30;
  std::uint32_t step = 3;
  bool operator==(const SweepRange&) const = default;

  std::vector<std::uint32_t> counts() const;
};

struct RunSettings {
  Tick max_ticks = 200000;
  std::vector<SchedulerKind> schedulers{kAllSchedulers.begin(), kAllSchedulers.end()};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  SweepRange sweep{};
  /// Tick at which per-circuit shares are sampled for the fairness index;
  /// 0 samples at run end.
  Tick fairness_horizon_ticks = 1000;
  bool operator==(const RunSettings&) const = default;
};

/// Fully resolved scenario file.
///
///   sim:      every SimConfig field by name
///   circuits: list of {ctype, count, <WorkloadSpec fields>}
///   run:      max_ticks, schedulers, seeds, sweep {from, to, step},
///             fairness_horizon_ticks
struct Scenario {
  SimConfig sim{};
  std::vector<CircuitGroup> circuits;
  RunSettings run{};
  bool operator==(const Scenario&) const = default;
};

/// 6 web, 4 streaming, 2 bulk circuits on the default SimConfig.
Scenario default_scenario();

/// Parses scenario text. Unknown keys and bad values raise ConfigError with a
/// "<origin>:<line>:<column>: " prefix; absent keys keep their defaults.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<config>");

Scenario load_scenario(const std::filesystem::path& path);

/// Every key with its effective value, in a form parse_scenario() accepts.
std::string to_yaml(const Scenario& scenario);

/// Circuit list with ids in file order.
std::vector<WorkloadSpec> expand_circuits(const std::vector<CircuitGroup>& groups);

/// Rescales the group counts to `total` circuits by largest remainder (ties
/// go to the earlier group) and expands them.
std::vector<WorkloadSpec> replicate_mix(const std::vector<CircuitGroup>& groups,
                                        std::uint32_t total);

}  // namespace circsched
