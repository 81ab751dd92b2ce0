#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "circsched/model.hpp"

namespace circsched {

struct WindowSample {
  std::uint64_t index = 0;
  Cells cells = 0;
  bool operator==(const WindowSample&) const = default;
};

/// Everything measured during one run.
struct RunRecord {
  std::vector<WindowSample> throughput_windows;
  /// Completed circuits: ticks from first arrival to queue flushed.
  std::map<CircuitId, Tick> flush_latency;
  /// Circuits still incomplete at run end: ticks observed so far.
  std::map<CircuitId, Tick> censored_latency;
  /// Cumulative flushed cells per circuit at `share_tick`.
  std::map<CircuitId, double> shares;
  Tick share_tick = 0;
  std::map<CircuitId, CircuitType> types;
  std::map<CircuitId, Cells> arrived;
  std::size_t n_circuits = 0;
  Cells written_total = 0;
  Tick ticks = 0;
  bool truncated = false;

  bool operator==(const RunRecord&) const = default;
};

/// (sum s)^2 / (n * sum s^2). All-zero (or empty) input is treated as
/// perfectly fair and returns 1.
double jain_index(std::span<const double> shares);
double jain_index(const RunRecord& record);

/// Cells per millisecond for each observation window.
std::vector<double> throughput_series(const RunRecord& record, const SimConfig& cfg);
double mean_throughput(const RunRecord& record, const SimConfig& cfg);

struct LatencyStep {
  Tick ticks = 0;
  double fraction = 0.0;  // of all circuits, completed within `ticks`
};

struct LatencyCdf {
  std::vector<LatencyStep> steps;
  std::size_t censored = 0;
  std::size_t n = 0;
};

/// Empirical CDF of flush latency over all circuits; censored circuits never
/// enter a step, so the final fraction is completed / n.
LatencyCdf latency_cdf(const RunRecord& record);

/// Nearest-rank percentile (p in (0, 1]) over all circuits, counting censored
/// circuits as slower than every completed one. nullopt when the rank falls
/// on a censored circuit.
std::optional<Tick> latency_percentile(const RunRecord& record, double p);

}  // namespace circsched
