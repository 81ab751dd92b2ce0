#include "circsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace circsched {

std::string_view to_string(CircuitType type) {
  switch (type) {
    case CircuitType::Web:
      return "web";
    case CircuitType::Bulk:
      return "bulk";
    case CircuitType::Streaming:
      return "streaming";
  }
  return "unknown";
}

std::optional<CircuitType> parse_circuit_type(std::string_view name) {
  for (auto type : kAllCircuitTypes) {
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

double TypePriority::operator[](CircuitType type) const {
  switch (type) {
    case CircuitType::Web:
      return web;
    case CircuitType::Bulk:
      return bulk;
    case CircuitType::Streaming:
      return streaming;
  }
  return 0.0;
}

void validate(const SimConfig& cfg) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid sim config: ") + what);
  };
  require(cfg.tick_ms > 0.0 && std::isfinite(cfg.tick_ms), "tick_ms must be positive");
  require(cfg.buffer_capacity_cells > 0, "buffer_capacity_cells must be positive");
  require(cfg.alpha1 > 0.0 && cfg.alpha1 < 1.0, "alpha1 must lie in (0,1)");
  require(cfg.alpha2 > 0.0 && cfg.alpha2 < 1.0, "alpha2 must lie in (0,1)");
  const auto& y = cfg.type_priority;
  require(y.bulk > 0.0, "type_priority values must be positive");
  require(y.web > y.streaming && y.streaming > y.bulk,
          "type_priority must order web > streaming > bulk");
  require(cfg.queue_cap_cells > 0, "queue_cap_cells must be positive");
  require(cfg.drain_cells_per_tick > 0, "drain_cells_per_tick must be positive");
  require(cfg.ewma_half_life_ms > 0.0, "ewma_half_life_ms must be positive");
  require(cfg.throughput_window_ticks > 0, "throughput_window_ticks must be positive");
  require(cfg.rate_floor > 0.0, "rate_floor must be positive");
}

Cells ScheduleDecision::total_cells() const {
  return std::accumulate(cells.begin(), cells.end(), Cells{0});
}

ScheduleDecision zero_decision(std::size_t n) {
  return ScheduleDecision{std::vector<double>(n, 0.0), std::vector<Cells>(n, 0)};
}

double priority(const CircuitState& circuit, const SimConfig& cfg) {
  const double depth = std::min(static_cast<double>(circuit.queue_cells) /
                                    static_cast<double>(cfg.queue_cap_cells),
                                1.0);
  return cfg.alpha1 * depth + cfg.alpha2 * cfg.type_priority[circuit.ctype];
}

Cells free_space(const ConnectionState& conn) {
  return conn.capacity_cells - conn.occupancy_cells;
}

std::vector<Cells> integerize(std::span<const double> allocation,
                              std::span<const Cells> queues, Cells free) {
  const std::size_t n = queues.size();
  std::vector<Cells> cells(n, 0);
  std::vector<double> remainder(n, 0.0);
  const Cells demand = std::accumulate(queues.begin(), queues.end(), Cells{0});
  const Cells target = std::min(free, demand);

  Cells assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::max(0.0, allocation[i]);
    const double whole = std::floor(a);
    cells[i] = std::min(static_cast<Cells>(whole), queues[i]);
    remainder[i] = cells[i] < queues[i] ? a - whole : 0.0;
    assigned += cells[i];
  }

  // Floors of a feasible allocation cannot overshoot, but trim from the
  // highest index if the caller passed an infeasible one.
  for (std::size_t i = n; assigned > target && i-- > 0;) {
    const Cells cut = std::min(cells[i], assigned - target);
    cells[i] -= cut;
    assigned -= cut;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });

  while (assigned < target) {
    bool progressed = false;
    for (std::size_t i : order) {
      if (assigned == target) break;
      if (cells[i] < queues[i]) {
        ++cells[i];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  return cells;
}

void integerize_decision(ScheduleDecision& decision,
                         std::span<const CircuitState> circuits, Cells free) {
  std::vector<double> allocation(circuits.size());
  std::vector<Cells> queues(circuits.size());
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    queues[i] = circuits[i].queue_cells;
    allocation[i] = decision.lambdas[i] * static_cast<double>(queues[i]);
  }
  decision.cells = integerize(allocation, queues, free);
}

}  // namespace circsched
