#include "circsched/traffic.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace circsched {

void validate(const WorkloadSpec& spec) {
  auto require = [&](bool ok, const char* what) {
    if (!ok) {
      throw std::invalid_argument(std::string("invalid ") +
                                  std::string(to_string(spec.ctype)) +
                                  " workload: " + what);
    }
  };
  require(spec.arrival_rate_cells_per_tick > 0,
          "arrival_rate_cells_per_tick must be positive");
  switch (spec.ctype) {
    case CircuitType::Web:
      require(spec.web_burst_bytes.lo <= spec.web_burst_bytes.hi,
              "web_burst_bytes range is empty");
      require(spec.web_burst_bytes.lo >= 4 * kMiB && spec.web_burst_bytes.hi <= 6 * kMiB,
              "web_burst_bytes must lie within [4 MiB, 6 MiB]");
      require(spec.web_gap_ticks.lo <= spec.web_gap_ticks.hi,
              "web_gap_ticks range is empty");
      require(spec.web_burst_count > 0, "web_burst_count must be positive");
      break;
    case CircuitType::Bulk:
      require(spec.bulk_total_bytes >= 50 * kMiB,
              "bulk_total_bytes must be at least 50 MiB");
      break;
    case CircuitType::Streaming:
      require(spec.stream_rate_cells_per_tick > 0,
              "stream_rate_cells_per_tick must be positive");
      require(spec.stream_total_bytes > 0, "stream_total_bytes must be positive");
      break;
  }
}

Cells bytes_to_cells(std::uint64_t bytes) {
  return bytes / kCellBytes + (bytes % kCellBytes != 0 ? 1 : 0);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t seed, CircuitId id) {
  return splitmix64(splitmix64(seed) ^ (std::uint64_t{id} + 1) * 0xD1B54A32D192ED03ULL);
}

std::uint64_t uniform_in(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  if (lo >= hi) return lo;
  const std::uint64_t span = hi - lo;
  if (span == std::numeric_limits<std::uint64_t>::max()) return rng();
  const std::uint64_t range = span + 1;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t draw = rng();
  while (draw >= limit) draw = rng();
  return lo + draw % range;
}

TrafficGenerator::TrafficGenerator(const WorkloadSpec& spec, std::uint64_t seed,
                                   CircuitId id)
    : spec_(spec), rng_(derive_stream_seed(seed, id)) {
  switch (spec_.ctype) {
    case CircuitType::Web:
      rate_ = spec_.arrival_rate_cells_per_tick;
      bursts_left_ = spec_.web_burst_count;
      if (bursts_left_ > 0) start_burst();
      break;
    case CircuitType::Bulk:
      rate_ = spec_.arrival_rate_cells_per_tick;
      phase_left_ = bytes_to_cells(spec_.bulk_total_bytes);
      break;
    case CircuitType::Streaming:
      rate_ = spec_.stream_rate_cells_per_tick;
      phase_left_ = bytes_to_cells(spec_.stream_total_bytes);
      break;
  }
  done_ = phase_left_ == 0 || rate_ == 0;
}

void TrafficGenerator::start_burst() {
  phase_left_ = bytes_to_cells(
      uniform_in(rng_, spec_.web_burst_bytes.lo, spec_.web_burst_bytes.hi));
}

Cells TrafficGenerator::next_arrivals() {
  if (done_) return 0;
  if (gap_left_ > 0) {
    if (--gap_left_ == 0) start_burst();
    return 0;
  }
  const Cells out = std::min(rate_, phase_left_);
  phase_left_ -= out;
  emitted_ += out;
  if (phase_left_ == 0) {
    if (spec_.ctype == CircuitType::Web && --bursts_left_ > 0) {
      gap_left_ = uniform_in(rng_, spec_.web_gap_ticks.lo, spec_.web_gap_ticks.hi);
      if (gap_left_ == 0) start_burst();
    } else {
      done_ = true;
    }
  }
  return out;
}

}  // namespace circsched
