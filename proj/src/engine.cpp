#include "circsched/engine.hpp"

#include <algorithm>
#include <string>

namespace circsched {

SchedulerKind scheduler_from_name(std::string_view name) {
  if (auto kind = parse_scheduler(name)) return *kind;
  throw ConfigError("unknown scheduler '" + std::string(name) +
                    "'; valid names: " + scheduler_name_list());
}

Simulation::Simulation(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
                       SchedulerKind scheduler)
    : cfg_(cfg), scheduler_(scheduler) {
  validate(cfg_);
  conn_.capacity_cells = cfg_.buffer_capacity_cells;
  generators_.reserve(workloads.size());
  circuits_.reserve(workloads.size());
  for (std::size_t i = 0; i < workloads.size(); ++i) {
    const auto id = static_cast<CircuitId>(i);
    generators_.emplace_back(workloads[i], cfg_.seed, id);
    CircuitState c;
    c.id = id;
    c.ctype = workloads[i].ctype;
    c.generator_done = generators_.back().done();
    circuits_.push_back(c);
  }
  trackers_.resize(circuits_.size());
  last_decision_ = zero_decision(circuits_.size());
}

bool Simulation::finished() const {
  if (conn_.occupancy_cells != 0) return false;
  return std::all_of(circuits_.begin(), circuits_.end(), [](const CircuitState& c) {
    return c.generator_done && c.queue_cells == 0;
  });
}

void Simulation::step() {
  ++tick_;
  const std::size_t n = circuits_.size();

  for (std::size_t i = 0; i < n; ++i) {
    auto& c = circuits_[i];
    const Cells arrived = generators_[i].next_arrivals();
    c.queue_cells += arrived;
    c.arrived_total += arrived;
    if (arrived > 0 && !c.first_arrival_tick) c.first_arrival_tick = tick_;
    c.generator_done = generators_[i].done();
  }

  conn_.occupancy_cells -= std::min(conn_.occupancy_cells, cfg_.drain_cells_per_tick);
  const Cells free = free_space(conn_);

  for (std::size_t i = 0; i < n; ++i) {
    trackers_[i] = arpf_update_tracker(trackers_[i], circuits_[i], cfg_, tick_);
  }
  last_decision_ = schedule(scheduler_, circuits_, trackers_, free, cfg_, cursor_);

  Cells moved = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = circuits_[i];
    const Cells cells = last_decision_.cells[i];
    c.queue_cells -= cells;
    c.flushed_total += cells;
    moved += cells;
    trackers_[i] = record_flush(trackers_[i], cells, cfg_);
    c.ewma_value = ewma_decay_then_add(c.ewma_value, cells, cfg_.tick_ms, cfg_.ewma_half_life_ms);
  }
  conn_.occupancy_cells += moved;
  conn_.written_total += moved;

  for (auto& c : circuits_) {
    if (!c.flush_complete_tick && c.generator_done && c.queue_cells == 0) {
      c.flush_complete_tick = tick_;
      if (!c.first_arrival_tick) c.first_arrival_tick = tick_;
    }
  }

  if (tick_ == share_horizon_) {
    horizon_shares_.clear();
    for (const auto& c : circuits_) horizon_shares_.push_back(c.flushed_total);
  }

  const std::uint64_t window = (tick_ - 1) / cfg_.throughput_window_ticks;
  if (windows_.empty() || windows_.back().index != window) windows_.push_back({window, 0});
  windows_.back().cells += moved;
}

RunRecord Simulation::record() const {
  RunRecord rec;
  rec.throughput_windows = windows_;
  rec.n_circuits = circuits_.size();
  rec.written_total = conn_.written_total;
  rec.ticks = tick_;
  const bool frozen = !horizon_shares_.empty();
  rec.share_tick = frozen ? share_horizon_ : tick_;
  for (const auto& c : circuits_) {
    rec.shares[c.id] = static_cast<double>(frozen ? horizon_shares_[c.id] : c.flushed_total);
    rec.types[c.id] = c.ctype;
    rec.arrived[c.id] = c.arrived_total;
    if (c.flush_complete_tick) {
      rec.flush_latency[c.id] = *c.flush_complete_tick - *c.first_arrival_tick;
    } else {
      const Tick start = c.first_arrival_tick.value_or(tick_);
      rec.censored_latency[c.id] = tick_ - start;
    }
  }
  return rec;
}

RunRecord run(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
              SchedulerKind scheduler, Tick max_ticks, Tick share_horizon) {
  Simulation sim(cfg, workloads, scheduler);
  sim.set_share_horizon(share_horizon);
  while (!sim.finished() && sim.tick() < max_ticks) sim.step();
  RunRecord rec = sim.record();
  rec.truncated = !sim.finished();
  return rec;
}

RunRecord run(const SimConfig& cfg, std::span<const WorkloadSpec> workloads,
              std::string_view scheduler_name, Tick max_ticks, Tick share_horizon) {
  return run(cfg, workloads, scheduler_from_name(scheduler_name), max_ticks, share_horizon);
}

}  // namespace circsched
