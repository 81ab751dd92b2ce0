#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace circsched {

/// Cells are Tor's fixed 512-byte units. All queue and buffer arithmetic is
/// done in whole cells.
using Cells = std::uint64_t;
using Tick = std::uint64_t;
using CircuitId = std::uint32_t;

inline constexpr std::uint64_t kCellBytes = 512;

enum class CircuitType : std::uint8_t { Web, Bulk, Streaming };

inline constexpr std::array<CircuitType, 3> kAllCircuitTypes = {
    CircuitType::Web, CircuitType::Bulk, CircuitType::Streaming};

std::string_view to_string(CircuitType type);

/// Parses "web", "bulk" or "streaming". Returns nullopt for anything else.
std::optional<CircuitType> parse_circuit_type(std::string_view name);

/// Numeric encoding of the traffic class, indexed by CircuitType.
struct TypePriority {
  double web = 3.0;
  double bulk = 1.0;
  double streaming = 2.0;

  double operator[](CircuitType type) const;
  bool operator==(const TypePriority&) const = default;
};

/// Scenario-wide constants. Defaults are the reference desk-scale setting.
struct SimConfig {
  double tick_ms = 10.0;
  Cells buffer_capacity_cells = 64;
  double alpha1 = 0.3;
  double alpha2 = 0.7;
  TypePriority type_priority{};
  Cells queue_cap_cells = 20000;
  Cells drain_cells_per_tick = 48;
  double ewma_half_life_ms = 3000.0;
  Tick throughput_window_ticks = 100;
  double rate_floor = 1e-6;
  std::uint64_t seed = 1;

  bool operator==(const SimConfig&) const = default;
};

/// Throws std::invalid_argument naming the first violated constraint.
void validate(const SimConfig& cfg);

struct CircuitState {
  CircuitId id = 0;
  CircuitType ctype = CircuitType::Web;
  Cells queue_cells = 0;
  Cells arrived_total = 0;
  Cells flushed_total = 0;
  bool generator_done = false;
  std::optional<Tick> first_arrival_tick;
  std::optional<Tick> flush_complete_tick;
  double ewma_value = 0.0;
};

/// Per-tick output of every scheduler: flush fractions and the whole cells
/// actually moved into the connection buffer.
struct ScheduleDecision {
  std::vector<double> lambdas;
  std::vector<Cells> cells;

  Cells total_cells() const;
};

/// Returns an all-zero decision sized for `n` circuits.
ScheduleDecision zero_decision(std::size_t n);

struct ConnectionState {
  Cells capacity_cells = 0;
  Cells occupancy_cells = 0;
  Cells written_total = 0;
};

/// gamma = alpha1 * min(queue / queue_cap, 1) + alpha2 * type_priority.
double priority(const CircuitState& circuit, const SimConfig& cfg);

Cells free_space(const ConnectionState& conn);

/// Converts real-valued per-circuit allocations into whole cells.
///
/// Each allocation is floored (and capped at its queue). The remaining slots,
/// up to min(free, sum of queues), are handed out one at a time in descending
/// order of fractional remainder; equal remainders go to the lower index.
/// The result never exceeds a queue or the free space.
std::vector<Cells> integerize(std::span<const double> allocation,
                              std::span<const Cells> queues, Cells free);

/// Fills `decision.cells` from `decision.lambdas` using integerize().
void integerize_decision(ScheduleDecision& decision,
                         std::span<const CircuitState> circuits, Cells free);

}  // namespace circsched
