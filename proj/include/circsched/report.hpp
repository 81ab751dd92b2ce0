#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "circsched/metrics.hpp"
#include "circsched/model.hpp"
#include "circsched/sched.hpp"

namespace circsched {

// CSV schemas. Every file starts with the header row below and every line,
// header included, ends with '\n'. Reals use the shortest round-trip
// decimal form; missing latency percentiles are written as NA.
//
//   throughput.csv  window_index,cells,cells_per_ms
//   latency.csv     circuit_id,type,latency_ticks,latency_ms,censored
//   fairness.csv    scheduler,n_circuits,jain
//   summary.csv     scheduler,seed,n_circuits,arrived_total,written_total,
//                   mean_throughput_cells_per_ms,jain,latency_p50_ms,
//                   latency_p80_ms,truncated
//   sweep.csv       circuit_count,scheduler,jain,mean_throughput,latency_p50

std::string format_real(double v);
std::string format_latency_ms(std::optional<Tick> ticks, const SimConfig& cfg);

void write_throughput_csv(std::ostream& out, const RunRecord& record, const SimConfig& cfg);
void write_latency_csv(std::ostream& out, const RunRecord& record, const SimConfig& cfg);
void write_fairness_csv(std::ostream& out, SchedulerKind scheduler, const RunRecord& record);

struct SummaryRow {
  SchedulerKind scheduler{};
  std::uint64_t seed = 0;
  std::size_t n_circuits = 0;
  Cells arrived_total = 0;
  Cells written_total = 0;
  double mean_throughput = 0.0;
  double jain = 0.0;
  std::optional<Tick> latency_p50;
  std::optional<Tick> latency_p80;
  bool truncated = false;
};

SummaryRow summarize(SchedulerKind scheduler, std::uint64_t seed, const RunRecord& record,
                     const SimConfig& cfg);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const SimConfig& cfg);

/// Seed-averaged result for one (circuit count, scheduler) pair.
struct SweepRow {
  std::uint32_t circuit_count = 0;
  SchedulerKind scheduler{};
  double jain = 0.0;
  double mean_throughput = 0.0;
  /// Mean over seeds of the median flush latency in ms; nullopt if any seed
  /// left the median circuit incomplete.
  std::optional<double> latency_p50_ms;
};

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Gnuplot-style series file: one "# <name>" block per series, each line
/// "<x> <y>", blocks separated by two blank lines.
struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

void write_plot_data(std::ostream& out, const std::string& title,
                     const std::vector<PlotSeries>& series);

}  // namespace circsched
