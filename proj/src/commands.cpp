#include "circsched/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "circsched/engine.hpp"
#include "circsched/report.hpp"
#include "circsched/scenario.hpp"

namespace circsched {

std::size_t thread_budget() {
  if (const char* env = std::getenv("CIRCUIT_SCHED_THREADS")) {
    std::size_t n = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec == std::errc{} && ptr == text.data() + text.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& job) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

Scenario resolve(const CommandOptions& opts) {
  Scenario s = opts.config ? load_scenario(*opts.config) : default_scenario();
  if (opts.scheduler) s.run.schedulers = {scheduler_from_name(*opts.scheduler)};
  if (opts.seed) {
    s.sim.seed = *opts.seed;
    s.run.seeds = {*opts.seed};
  }
  if (opts.max_ticks) {
    if (*opts.max_ticks == 0) throw ConfigError("--max-ticks must be positive");
    s.run.max_ticks = *opts.max_ticks;
  }
  return s;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void prepare_output(const CommandOptions& opts, const Scenario& s) {
  std::filesystem::create_directories(opts.out_dir);
  write_file(opts.out_dir / "resolved-config.yaml", [&](std::ostream& o) { o << to_yaml(s); });
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

SimConfig with_seed(SimConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

}  // namespace

int cmd_simulate(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    Scenario s = resolve(opts);
    const SchedulerKind kind = s.run.schedulers.front();
    s.run.schedulers = {kind};
    const auto workloads = expand_circuits(s.circuits);
    const RunRecord rec =
        run(s.sim, workloads, kind, s.run.max_ticks, s.run.fairness_horizon_ticks);

    prepare_output(opts, s);
    write_file(opts.out_dir / "throughput.csv",
               [&](std::ostream& o) { write_throughput_csv(o, rec, s.sim); });
    write_file(opts.out_dir / "latency.csv",
               [&](std::ostream& o) { write_latency_csv(o, rec, s.sim); });
    write_file(opts.out_dir / "fairness.csv",
               [&](std::ostream& o) { write_fairness_csv(o, kind, rec); });
  });
}

int cmd_compare(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve(opts);
    const auto workloads = expand_circuits(s.circuits);
    const std::size_t n_sched = s.run.schedulers.size();
    const std::size_t n_seed = s.run.seeds.size();

    std::vector<RunRecord> records(n_sched * n_seed);
    parallel_for(records.size(), thread_budget(), [&](std::size_t j) {
      const auto kind = s.run.schedulers[j / n_seed];
      const auto seed = s.run.seeds[j % n_seed];
      records[j] = run(with_seed(s.sim, seed), workloads, kind, s.run.max_ticks,
                       s.run.fairness_horizon_ticks);
    });

    std::vector<SummaryRow> rows;
    std::vector<PlotSeries> cdf;
    for (std::size_t k = 0; k < n_sched; ++k) {
      PlotSeries series{std::string(to_string(s.run.schedulers[k])), {}};
      std::vector<Tick> pooled;
      std::size_t total = 0;
      for (std::size_t i = 0; i < n_seed; ++i) {
        const auto& rec = records[k * n_seed + i];
        rows.push_back(summarize(s.run.schedulers[k], s.run.seeds[i], rec, s.sim));
        for (const auto& [id, t] : rec.flush_latency) pooled.push_back(t);
        total += rec.n_circuits;
      }
      std::sort(pooled.begin(), pooled.end());
      for (std::size_t i = 0; i < pooled.size(); ++i) {
        if (i + 1 < pooled.size() && pooled[i + 1] == pooled[i]) continue;
        series.points.emplace_back(static_cast<double>(pooled[i]) * s.sim.tick_ms,
                                   static_cast<double>(i + 1) / static_cast<double>(total));
      }
      cdf.push_back(std::move(series));
    }

    prepare_output(opts, s);
    write_file(opts.out_dir / "summary.csv",
               [&](std::ostream& o) { write_summary_csv(o, rows, s.sim); });
    write_file(opts.out_dir / "plot_latency_cdf.dat", [&](std::ostream& o) {
      write_plot_data(o, "flush latency (ms) vs fraction of circuits flushed", cdf);
    });
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = resolve(opts);
    const auto counts = s.run.sweep.counts();
    if (counts.empty()) {
      throw ConfigError("sweep range is empty (from " + std::to_string(s.run.sweep.from) +
                        ", to " + std::to_string(s.run.sweep.to) + ", step " +
                        std::to_string(s.run.sweep.step) + ")");
    }
    const std::size_t n_sched = s.run.schedulers.size();
    const std::size_t n_seed = s.run.seeds.size();

    std::vector<std::vector<WorkloadSpec>> mixes;
    for (auto count : counts) mixes.push_back(replicate_mix(s.circuits, count));

    std::vector<RunRecord> records(counts.size() * n_sched * n_seed);
    parallel_for(records.size(), thread_budget(), [&](std::size_t j) {
      const std::size_t c = j / (n_sched * n_seed);
      const auto kind = s.run.schedulers[(j / n_seed) % n_sched];
      const auto seed = s.run.seeds[j % n_seed];
      records[j] = run(with_seed(s.sim, seed), mixes[c], kind, s.run.max_ticks,
                       s.run.fairness_horizon_ticks);
    });

    std::vector<SweepRow> rows;
    std::vector<PlotSeries> jain(n_sched), thr(n_sched), lat(n_sched);
    for (std::size_t k = 0; k < n_sched; ++k) {
      jain[k].name = thr[k].name = lat[k].name = std::string(to_string(s.run.schedulers[k]));
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (std::size_t k = 0; k < n_sched; ++k) {
        SweepRow row;
        row.circuit_count = counts[c];
        row.scheduler = s.run.schedulers[k];
        double latency_sum = 0.0;
        bool latency_known = true;
        for (std::size_t i = 0; i < n_seed; ++i) {
          const auto& rec = records[(c * n_sched + k) * n_seed + i];
          row.jain += jain_index(rec);
          row.mean_throughput += mean_throughput(rec, s.sim);
          if (auto p50 = latency_percentile(rec, 0.5)) {
            latency_sum += static_cast<double>(*p50) * s.sim.tick_ms;
          } else {
            latency_known = false;
          }
        }
        const auto seeds = static_cast<double>(n_seed);
        row.jain /= seeds;
        row.mean_throughput /= seeds;
        if (latency_known) row.latency_p50_ms = latency_sum / seeds;

        const auto x = static_cast<double>(counts[c]);
        jain[k].points.emplace_back(x, row.jain);
        thr[k].points.emplace_back(x, row.mean_throughput);
        if (row.latency_p50_ms) lat[k].points.emplace_back(x, *row.latency_p50_ms);
        rows.push_back(row);
      }
    }

    prepare_output(opts, s);
    write_file(opts.out_dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, rows); });
    write_file(opts.out_dir / "plot_jain.dat", [&](std::ostream& o) {
      write_plot_data(o, "circuit count vs mean Jain index", jain);
    });
    write_file(opts.out_dir / "plot_throughput.dat", [&](std::ostream& o) {
      write_plot_data(o, "circuit count vs mean window throughput (cells/ms)", thr);
    });
    write_file(opts.out_dir / "plot_latency_p50.dat", [&](std::ostream& o) {
      write_plot_data(o, "circuit count vs median flush latency (ms)", lat);
    });
  });
}

}  // namespace circsched
