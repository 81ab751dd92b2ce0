#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circsched/model.hpp"

namespace circsched {

/// Flush-rate bookkeeping for the average-rate proportional-fair scheduler.
/// Rates are in cells per millisecond.
struct RateTracker {
  Cells flushed_history_sum = 0;  // cells flushed on ticks 1..j-1
  double avg_rate = 0.0;          // R
  double inst_rate = 0.0;         // r, last tick
  double h = 0.0;                 // tick_ms * R / gamma
};

/// Prepares the tracker for scheduling at `tick` (1-based): recomputes the
/// average rate over the elapsed (tick-1) ticks, floored at cfg.rate_floor,
/// and h from the circuit's current priority. Tick 1 has no history and
/// uses the floor.
RateTracker arpf_update_tracker(RateTracker tracker, const CircuitState& circuit,
                                const SimConfig& cfg, Tick tick);

/// Accounts for the cells flushed on the current tick.
RateTracker record_flush(RateTracker tracker, Cells flushed, const SimConfig& cfg);

enum class SchedulerKind { RoundRobin, Ewma, ArPf, OptPf };

inline constexpr std::array<SchedulerKind, 4> kAllSchedulers = {
    SchedulerKind::RoundRobin, SchedulerKind::Ewma, SchedulerKind::ArPf,
    SchedulerKind::OptPf};

std::string_view to_string(SchedulerKind kind);
std::optional<SchedulerKind> parse_scheduler(std::string_view name);

/// "rr, ewma, arpf, optpf"
std::string scheduler_name_list();

/// Engine-owned state of the stateful schedulers.
struct RoundRobinCursor {
  std::optional<std::size_t> last_served;
};

/// Visits non-empty circuits in index order, starting after the last served
/// one, granting one cell per visit.
ScheduleDecision round_robin(std::span<const CircuitState> circuits, Cells free,
                             RoundRobinCursor& cursor);

double ewma_decay_then_add(double ewma_value, Cells sent, double elapsed_ms,
                           double half_life_ms);

/// Strict priority by ascending EWMA value (ties by index); each circuit's
/// whole queue is flushed before the next one is considered.
ScheduleDecision ewma_schedule(std::span<const CircuitState> circuits, Cells free);

/// Web when the EWMA counter is below the threshold, otherwise Bulk.
CircuitType classify_by_ewma(double ewma_value, double threshold);

/// Median EWMA value over `circuits`; the default classifier threshold.
double median_ewma(std::span<const CircuitState> circuits);

/// Continuous AR-PF flush fractions. Allocation is proportional to h over the
/// non-empty circuits; fractions above 1 are clamped and their surplus is
/// re-shared among the rest until no clamp is added.
std::vector<double> arpf_fractions(std::span<const Cells> queues,
                                   std::span<const double> h, Cells free);

ScheduleDecision arpf_schedule(std::span<const CircuitState> circuits,
                               std::span<const RateTracker> trackers, Cells free,
                               const SimConfig& cfg);

/// Dispatches to the named scheduler. `trackers` must hold one entry per
/// circuit, already refreshed for this tick when `kind` is ArPf.
ScheduleDecision schedule(SchedulerKind kind, std::span<const CircuitState> circuits,
                          std::span<const RateTracker> trackers, Cells free,
                          const SimConfig& cfg, RoundRobinCursor& cursor);

}  // namespace circsched
