#include "circsched/report.hpp"

#include <charconv>

namespace circsched {

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string format_latency_ms(std::optional<Tick> ticks, const SimConfig& cfg) {
  if (!ticks) return "NA";
  return format_real(static_cast<double>(*ticks) * cfg.tick_ms);
}

void write_throughput_csv(std::ostream& out, const RunRecord& record, const SimConfig& cfg) {
  const auto series = throughput_series(record, cfg);
  out << "window_index,cells,cells_per_ms\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& w = record.throughput_windows[i];
    out << w.index << ',' << w.cells << ',' << format_real(series[i]) << '\n';
  }
}

void write_latency_csv(std::ostream& out, const RunRecord& record, const SimConfig& cfg) {
  out << "circuit_id,type,latency_ticks,latency_ms,censored\n";
  for (const auto& [id, type] : record.types) {
    Tick ticks = 0;
    bool censored = false;
    if (auto it = record.flush_latency.find(id); it != record.flush_latency.end()) {
      ticks = it->second;
    } else {
      ticks = record.censored_latency.at(id);
      censored = true;
    }
    out << id << ',' << to_string(type) << ',' << ticks << ','
        << format_real(static_cast<double>(ticks) * cfg.tick_ms) << ','
        << (censored ? 1 : 0) << '\n';
  }
}

void write_fairness_csv(std::ostream& out, SchedulerKind scheduler, const RunRecord& record) {
  out << "scheduler,n_circuits,jain\n";
  out << to_string(scheduler) << ',' << record.n_circuits << ','
      << format_real(jain_index(record)) << '\n';
}

SummaryRow summarize(SchedulerKind scheduler, std::uint64_t seed, const RunRecord& record,
                     const SimConfig& cfg) {
  SummaryRow row;
  row.scheduler = scheduler;
  row.seed = seed;
  row.n_circuits = record.n_circuits;
  for (const auto& [id, cells] : record.arrived) row.arrived_total += cells;
  row.written_total = record.written_total;
  row.mean_throughput = mean_throughput(record, cfg);
  row.jain = jain_index(record);
  row.latency_p50 = latency_percentile(record, 0.5);
  row.latency_p80 = latency_percentile(record, 0.8);
  row.truncated = record.truncated;
  return row;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const SimConfig& cfg) {
  out << "scheduler,seed,n_circuits,arrived_total,written_total,"
         "mean_throughput_cells_per_ms,jain,latency_p50_ms,latency_p80_ms,truncated\n";
  for (const auto& r : rows) {
    out << to_string(r.scheduler) << ',' << r.seed << ',' << r.n_circuits << ','
        << r.arrived_total << ',' << r.written_total << ',' << format_real(r.mean_throughput)
        << ',' << format_real(r.jain) << ',' << format_latency_ms(r.latency_p50, cfg) << ','
        << format_latency_ms(r.latency_p80, cfg) << ',' << (r.truncated ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "circuit_count,scheduler,jain,mean_throughput,latency_p50\n";
  for (const auto& r : rows) {
    out << r.circuit_count << ',' << to_string(r.scheduler) << ',' << format_real(r.jain) << ','
        << format_real(r.mean_throughput) << ','
        << (r.latency_p50_ms ? format_real(*r.latency_p50_ms) : std::string("NA")) << '\n';
  }
}

void write_plot_data(std::ostream& out, const std::string& title,
                     const std::vector<PlotSeries>& series) {
  out << "# " << title << '\n';
  bool first = true;
  for (const auto& s : series) {
    if (!first) out << "\n\n";
    first = false;
    out << "# " << s.name << '\n';
    for (const auto& [x, y] : s.points) out << format_real(x) << ' ' << format_real(y) << '\n';
  }
}

}  // namespace circsched
