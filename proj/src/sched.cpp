#include "circsched/sched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "circsched/optsched.hpp"

namespace circsched {

RateTracker arpf_update_tracker(RateTracker tracker, const CircuitState& circuit,
                                const SimConfig& cfg, Tick tick) {
  if (tick >= 2) {
    const double elapsed_ms = static_cast<double>(tick - 1) * cfg.tick_ms;
    tracker.avg_rate =
        std::max(cfg.rate_floor, static_cast<double>(tracker.flushed_history_sum) / elapsed_ms);
  } else {
    tracker.avg_rate = cfg.rate_floor;
  }
  tracker.h = cfg.tick_ms * tracker.avg_rate / priority(circuit, cfg);
  return tracker;
}

RateTracker record_flush(RateTracker tracker, Cells flushed, const SimConfig& cfg) {
  tracker.inst_rate = static_cast<double>(flushed) / cfg.tick_ms;
  tracker.flushed_history_sum += flushed;
  return tracker;
}

std::string_view to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::RoundRobin:
      return "rr";
    case SchedulerKind::Ewma:
      return "ewma";
    case SchedulerKind::ArPf:
      return "arpf";
    case SchedulerKind::OptPf:
      return "optpf";
  }
  return "unknown";
}

std::optional<SchedulerKind> parse_scheduler(std::string_view name) {
  for (auto kind : kAllSchedulers) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string scheduler_name_list() {
  std::string out;
  for (auto kind : kAllSchedulers) {
    if (!out.empty()) out += ", ";
    out += to_string(kind);
  }
  return out;
}

namespace {

void fill_lambdas(ScheduleDecision& decision, std::span<const CircuitState> circuits) {
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    decision.lambdas[i] =
        circuits[i].queue_cells == 0
            ? 0.0
            : static_cast<double>(decision.cells[i]) /
                  static_cast<double>(circuits[i].queue_cells);
  }
}

}  // namespace

ScheduleDecision round_robin(std::span<const CircuitState> circuits, Cells free,
                             RoundRobinCursor& cursor) {
  const std::size_t n = circuits.size();
  auto decision = zero_decision(n);
  if (n == 0) return decision;

  std::size_t pos = cursor.last_served ? (*cursor.last_served + 1) % n : 0;
  Cells left = free;
  while (left > 0) {
    bool granted = false;
    for (std::size_t visited = 0; visited < n && left > 0; ++visited) {
      if (decision.cells[pos] < circuits[pos].queue_cells) {
        ++decision.cells[pos];
        --left;
        cursor.last_served = pos;
        granted = true;
      }
      pos = (pos + 1) % n;
    }
    if (!granted) break;
  }
  fill_lambdas(decision, circuits);
  return decision;
}

double ewma_decay_then_add(double ewma_value, Cells sent, double elapsed_ms,
                           double half_life_ms) {
  return ewma_value * std::exp2(-elapsed_ms / half_life_ms) + static_cast<double>(sent);
}

ScheduleDecision ewma_schedule(std::span<const CircuitState> circuits, Cells free) {
  auto decision = zero_decision(circuits.size());
  std::vector<std::size_t> order(circuits.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return circuits[a].ewma_value < circuits[b].ewma_value;
  });

  Cells left = free;
  for (std::size_t i : order) {
    if (left == 0) break;
    const Cells take = std::min(left, circuits[i].queue_cells);
    decision.cells[i] = take;
    left -= take;
  }
  fill_lambdas(decision, circuits);
  return decision;
}

CircuitType classify_by_ewma(double ewma_value, double threshold) {
  return ewma_value < threshold ? CircuitType::Web : CircuitType::Bulk;
}

double median_ewma(std::span<const CircuitState> circuits) {
  if (circuits.empty()) return 0.0;
  std::vector<double> values;
  values.reserve(circuits.size());
  for (const auto& c : circuits) values.push_back(c.ewma_value);
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<double> arpf_fractions(std::span<const Cells> queues,
                                   std::span<const double> h, Cells free) {
  const std::size_t n = queues.size();
  std::vector<double> lambdas(n, 0.0);

  std::vector<std::size_t> open;
  Cells demand = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (queues[i] > 0) {
      open.push_back(i);
      demand += queues[i];
    }
  }
  if (open.empty() || free == 0) return lambdas;
  if (demand <= free) {
    for (std::size_t i : open) lambdas[i] = 1.0;
    return lambdas;
  }

  double budget = static_cast<double>(free);
  // Each round either clamps at least one circuit or terminates.
  while (!open.empty()) {
    double sum_h = 0.0;
    for (std::size_t i : open) sum_h += h[i];

    std::vector<std::size_t> still_open;
    for (std::size_t i : open) {
      const double share = h[i] * budget / sum_h;
      if (share >= static_cast<double>(queues[i])) {
        lambdas[i] = 1.0;
      } else {
        still_open.push_back(i);
      }
    }
    if (still_open.size() == open.size()) {
      for (std::size_t i : open) {
        lambdas[i] = h[i] * budget / (static_cast<double>(queues[i]) * sum_h);
      }
      break;
    }
    for (std::size_t i : open) {
      if (lambdas[i] == 1.0) budget -= static_cast<double>(queues[i]);
    }
    open = std::move(still_open);
  }
  return lambdas;
}

ScheduleDecision arpf_schedule(std::span<const CircuitState> circuits,
                               std::span<const RateTracker> trackers, Cells free,
                               const SimConfig& /*cfg*/) {
  const std::size_t n = circuits.size();
  std::vector<Cells> queues(n);
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    queues[i] = circuits[i].queue_cells;
    h[i] = trackers[i].h;
  }
  ScheduleDecision decision;
  decision.lambdas = arpf_fractions(queues, h, free);
  integerize_decision(decision, circuits, free);
  return decision;
}

ScheduleDecision schedule(SchedulerKind kind, std::span<const CircuitState> circuits,
                          std::span<const RateTracker> trackers, Cells free,
                          const SimConfig& cfg, RoundRobinCursor& cursor) {
  switch (kind) {
    case SchedulerKind::RoundRobin:
      return round_robin(circuits, free, cursor);
    case SchedulerKind::Ewma:
      return ewma_schedule(circuits, free);
    case SchedulerKind::ArPf:
      return arpf_schedule(circuits, trackers, free, cfg);
    case SchedulerKind::OptPf:
      return optpf_schedule(circuits, free, cfg);
  }
  return zero_decision(circuits.size());
}

}  // namespace circsched
