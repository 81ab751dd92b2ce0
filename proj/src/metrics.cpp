#include "circsched/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace circsched {

double jain_index(std::span<const double> shares) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double s : shares) {
    sum += s;
    sum_sq += s * s;
  }
  if (sum_sq == 0.0) return 1.0;
  return (sum * sum) / (static_cast<double>(shares.size()) * sum_sq);
}

double jain_index(const RunRecord& record) {
  std::vector<double> shares;
  shares.reserve(record.shares.size());
  for (const auto& [id, s] : record.shares) shares.push_back(s);
  return jain_index(shares);
}

std::vector<double> throughput_series(const RunRecord& record, const SimConfig& cfg) {
  const double window_ms = static_cast<double>(cfg.throughput_window_ticks) * cfg.tick_ms;
  std::vector<double> out;
  out.reserve(record.throughput_windows.size());
  for (const auto& w : record.throughput_windows) {
    out.push_back(static_cast<double>(w.cells) / window_ms);
  }
  return out;
}

double mean_throughput(const RunRecord& record, const SimConfig& cfg) {
  const auto series = throughput_series(record, cfg);
  if (series.empty()) return 0.0;
  double total = 0.0;
  for (double v : series) total += v;
  return total / static_cast<double>(series.size());
}

LatencyCdf latency_cdf(const RunRecord& record) {
  LatencyCdf cdf;
  cdf.n = record.n_circuits;
  cdf.censored = record.censored_latency.size();
  if (cdf.n == 0) return cdf;

  std::vector<Tick> sorted;
  for (const auto& [id, ticks] : record.flush_latency) sorted.push_back(ticks);
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(cdf.n);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double fraction = static_cast<double>(i + 1) / n;
    if (!cdf.steps.empty() && cdf.steps.back().ticks == sorted[i]) {
      cdf.steps.back().fraction = fraction;
    } else {
      cdf.steps.push_back({sorted[i], fraction});
    }
  }
  return cdf;
}

std::optional<Tick> latency_percentile(const RunRecord& record, double p) {
  if (record.n_circuits == 0) return std::nullopt;
  std::vector<Tick> sorted;
  for (const auto& [id, ticks] : record.flush_latency) sorted.push_back(ticks);
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(record.n_circuits) - 1e-12));
  const std::size_t k = std::max<std::size_t>(rank, 1);
  if (k > sorted.size()) return std::nullopt;
  return sorted[k - 1];
}

}  // namespace circsched
