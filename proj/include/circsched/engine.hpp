#pragma once

#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "circsched/metrics.hpp"
#include "circsched/model.hpp"
#include "circsched/sched.hpp"
#include "circsched/traffic.hpp"

namespace circsched {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Resolves a scheduler name or throws ConfigError listing the valid ones.
SchedulerKind scheduler_from_name(std::string_view name);

/// One relay connection fed by one queue per circuit. Circuit ids are the
/// positions in the workload list.
///
/// Each step runs, in order: arrivals, buffer drain, scheduling into the
/// free space, queue-to-buffer move, rate/EWMA bookkeeping, then completion
/// and throughput accounting.
class Simulation {
 public:
  Simulation(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
             SchedulerKind scheduler);

  /// Freezes the per-circuit shares reported by record() at the end of tick
  /// `tick`. 0 (the default) reports shares at the current tick.
  void set_share_horizon(Tick tick) { share_horizon_ = tick; }

  void step();

  /// All sources exhausted, all queues and the connection buffer empty.
  bool finished() const;

  Tick tick() const { return tick_; }
  const SimConfig& config() const { return cfg_; }
  const std::vector<CircuitState>& circuits() const { return circuits_; }
  const std::vector<RateTracker>& trackers() const { return trackers_; }
  const ConnectionState& connection() const { return conn_; }
  const ScheduleDecision& last_decision() const { return last_decision_; }

  /// Snapshot of the measurements so far; incomplete circuits are censored.
  RunRecord record() const;

 private:
  SimConfig cfg_;
  SchedulerKind scheduler_;
  std::vector<TrafficGenerator> generators_;
  std::vector<CircuitState> circuits_;
  std::vector<RateTracker> trackers_;
  ConnectionState conn_;
  RoundRobinCursor cursor_;
  ScheduleDecision last_decision_;
  std::vector<WindowSample> windows_;
  std::vector<Cells> horizon_shares_;
  Tick share_horizon_ = 0;
  Tick tick_ = 0;
};

/// Steps until finished() or `max_ticks`; a run cut short is flagged as
/// truncated. See Simulation::set_share_horizon() for `share_horizon`.
RunRecord run(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
              SchedulerKind scheduler, Tick max_ticks, Tick share_horizon = 0);

RunRecord run(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
              std::string_view scheduler_name, Tick max_ticks, Tick share_horizon = 0);

}  // namespace circsched
