#pragma once

#include <cstdint>
#include <random>

#include "circsched/model.hpp"

namespace circsched {

inline constexpr std::uint64_t kMiB = std::uint64_t{1} << 20;

template <typename T>
struct Range {
  T lo{};
  T hi{};
  bool operator==(const Range&) const = default;
};

/// Workload for a single circuit. Only the fields for `ctype` are read.
struct WorkloadSpec {
  CircuitType ctype = CircuitType::Web;
  Range<std::uint64_t> web_burst_bytes{4 * kMiB, 6 * kMiB};
  Range<Tick> web_gap_ticks{20, 100};
  std::uint32_t web_burst_count = 1;
  std::uint64_t bulk_total_bytes = 50 * kMiB;
  Cells stream_rate_cells_per_tick = 4;
  std::uint64_t stream_total_bytes = 20 * kMiB;
  Cells arrival_rate_cells_per_tick = 12;

  bool operator==(const WorkloadSpec&) const = default;
};

/// Enforces the workload bounds of the reference scenarios: web bursts within
/// 4..6 MiB, bulk transfers of at least 50 MiB, positive rates. Throws
/// std::invalid_argument.
void validate(const WorkloadSpec& spec);

Cells bytes_to_cells(std::uint64_t bytes);

// Randomness
//
// Every circuit owns an independent std::mt19937_64 stream. The engine seed
// and the circuit id are combined with the SplitMix64 finalizer to produce
// the stream seed, so streams are stable across platforms and do not depend
// on how many circuits exist or in which order they are drawn.

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_stream_seed(std::uint64_t seed, CircuitId id);

/// Uniform integer in [lo, hi] by rejection sampling. Unlike
/// std::uniform_int_distribution the mapping is fixed here, so the sequence
/// is identical under every standard library.
std::uint64_t uniform_in(Rng& rng, std::uint64_t lo, std::uint64_t hi);

/// Per-circuit arrival process.
///
/// web:       bursts of `arrival_rate` cells/tick until a sampled burst size
///            is exhausted, then a sampled idle gap; `web_burst_count` bursts
/// bulk:      `arrival_rate` cells/tick until `bulk_total_bytes` is emitted
/// streaming: `stream_rate` cells/tick until `stream_total_bytes` is emitted
class TrafficGenerator {
 public:
  TrafficGenerator(const WorkloadSpec& spec, std::uint64_t seed, CircuitId id);

  /// Cells entering the queue this tick. Returns 0 forever once done().
  Cells next_arrivals();

  bool done() const { return done_; }
  Cells emitted_total() const { return emitted_; }
  const WorkloadSpec& spec() const { return spec_; }

 private:
  void start_burst();

  WorkloadSpec spec_;
  Rng rng_;
  Cells rate_ = 0;
  Cells phase_left_ = 0;  // cells left in the current burst or transfer
  Tick gap_left_ = 0;
  std::uint32_t bursts_left_ = 0;
  Cells emitted_ = 0;
  bool done_ = false;
};

}  // namespace circsched
