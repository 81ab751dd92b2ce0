#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "circsched/engine.hpp"
#include "circsched/sched.hpp"
#include "test_support.hpp"

using namespace circsched;
using namespace circsched::testing;

namespace {

std::vector<CircuitState> queues_of(std::vector<Cells> zeta, CircuitType type = CircuitType::Bulk) {
  std::vector<CircuitState> out(zeta.size());
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    out[i].id = static_cast<CircuitId>(i);
    out[i].ctype = type;
    out[i].queue_cells = zeta[i];
  }
  return out;
}

Cells sum_of(const std::vector<Cells>& v) {
  Cells s = 0;
  for (Cells c : v) s += c;
  return s;
}

}  // namespace

TEST_CASE("scheduler names") {
  for (auto k : kAllSchedulers) CHECK(parse_scheduler(to_string(k)) == k);
  CHECK_FALSE(parse_scheduler("foo").has_value());
  CHECK(scheduler_name_list() == "rr, ewma, arpf, optpf");
}

TEST_CASE("round robin") {
  RoundRobinCursor cursor;
  SUBCASE("equal queues split evenly") {
    CHECK(round_robin(queues_of({5, 5}), 4, cursor).cells == std::vector<Cells>{2, 2});
  }
  SUBCASE("short queue is skipped once empty") {
    CHECK(round_robin(queues_of({1, 5}), 4, cursor).cells == std::vector<Cells>{1, 3});
  }
  SUBCASE("single circuit") {
    const auto d = round_robin(queues_of({5}), 2, cursor);
    CHECK(d.cells == std::vector<Cells>{2});
    CHECK(d.lambdas[0] == doctest::Approx(0.4));
  }
  SUBCASE("resumes after the last served circuit") {
    const auto circuits = queues_of({5, 5, 5});
    CHECK(round_robin(circuits, 4, cursor).cells == std::vector<Cells>{2, 1, 1});
    CHECK(cursor.last_served == std::size_t{0});
    CHECK(round_robin(circuits, 2, cursor).cells == std::vector<Cells>{0, 1, 1});
  }
  SUBCASE("no free space") {
    CHECK(round_robin(queues_of({5, 5}), 0, cursor).cells == std::vector<Cells>{0, 0});
  }
}

TEST_CASE("ewma decay") {
  CHECK(ewma_decay_then_add(10.0, 0, 3000.0, 3000.0) == doctest::Approx(5.0));
  CHECK(ewma_decay_then_add(0.0, 7, 10.0, 3000.0) == doctest::Approx(7.0));
  CHECK(ewma_decay_then_add(10.0, 3, 6000.0, 3000.0) == doctest::Approx(5.5));
  CHECK(ewma_decay_then_add(10.0, 0, 0.0, 3000.0) == 10.0);
}

TEST_CASE("ewma decay composes over consecutive intervals") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const double v = draw_real(rng, 0.0, 1e4);
    const double a = draw_real(rng, 0.0, 5000.0);
    const double b = draw_real(rng, 0.0, 5000.0);
    const double hl = draw_real(rng, 1.0, 1e4);
    const double split = ewma_decay_then_add(ewma_decay_then_add(v, 0, a, hl), 0, b, hl);
    CHECK(split == doctest::Approx(ewma_decay_then_add(v, 0, a + b, hl)).epsilon(1e-12));
  }
}

TEST_CASE("ewma scheduling") {
  auto circuits = queues_of({10, 10});
  circuits[0].ewma_value = 2.0;
  circuits[1].ewma_value = 9.0;
  SUBCASE("quietest circuit is flushed first") {
    CHECK(ewma_schedule(circuits, 12).cells == std::vector<Cells>{10, 2});
  }
  SUBCASE("order follows the counter, not the index") {
    circuits[0].ewma_value = 20.0;
    CHECK(ewma_schedule(circuits, 12).cells == std::vector<Cells>{2, 10});
  }
  SUBCASE("ties go to the lower index") {
    circuits[1].ewma_value = 2.0;
    CHECK(ewma_schedule(circuits, 15).cells == std::vector<Cells>{10, 5});
  }
  SUBCASE("no free space") {
    CHECK(ewma_schedule(circuits, 0).cells == std::vector<Cells>{0, 0});
  }
}

TEST_CASE("ewma scheduling is strict priority") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto circuits = random_circuits(rng, draw(rng, 1, 10), 100);
    const Cells free = draw(rng, 0, 300);
    const auto d = ewma_schedule(circuits, free);
    for (std::size_t i = 0; i < circuits.size(); ++i) {
      if (d.cells[i] == circuits[i].queue_cells) continue;
      // i was cut short, so nobody quieter-ranked behind it got anything.
      for (std::size_t j = 0; j < circuits.size(); ++j) {
        if (circuits[j].ewma_value > circuits[i].ewma_value) CHECK(d.cells[j] == 0);
      }
    }
  }
}

TEST_CASE("ewma classifier") {
  CHECK(classify_by_ewma(1.0, 2.0) == CircuitType::Web);
  CHECK(classify_by_ewma(2.0, 2.0) == CircuitType::Bulk);
  CHECK(classify_by_ewma(std::nextafter(2.0, 0.0), 2.0) == CircuitType::Web);
  auto circuits = queues_of({1, 1, 1});
  circuits[0].ewma_value = 5.0;
  circuits[1].ewma_value = 1.0;
  circuits[2].ewma_value = 3.0;
  CHECK(median_ewma(circuits) == 3.0);
  circuits.pop_back();
  CHECK(median_ewma(circuits) == 3.0);
}

TEST_CASE("rate tracker") {
  SimConfig cfg;
  const auto c = queues_of({100}, CircuitType::Web)[0];

  SUBCASE("first tick uses the rate floor") {
    const auto t = arpf_update_tracker({}, c, cfg, 1);
    CHECK(t.avg_rate == cfg.rate_floor);
    CHECK(t.h > 0.0);
  }
  SUBCASE("average over the elapsed ticks") {
    RateTracker t;
    t.flushed_history_sum = 100;
    t = arpf_update_tracker(t, c, cfg, 6);  // 5 ticks = 50 ms
    CHECK(t.avg_rate == doctest::Approx(2.0));
    CHECK(t.h == doctest::Approx(cfg.tick_ms * 2.0 / priority(c, cfg)));
  }
  SUBCASE("doubling the priority halves h") {
    SimConfig doubled = cfg;
    doubled.alpha1 *= 2;
    doubled.alpha2 *= 2;
    RateTracker t;
    t.flushed_history_sum = 300;
    const auto a = arpf_update_tracker(t, c, cfg, 20);
    const auto b = arpf_update_tracker(t, c, doubled, 20);
    CHECK(b.h == doctest::Approx(a.h / 2));
  }
  SUBCASE("record_flush accumulates history") {
    auto t = record_flush({}, 30, cfg);
    t = record_flush(t, 12, cfg);
    CHECK(t.flushed_history_sum == 42);
    CHECK(t.inst_rate == doctest::Approx(1.2));
  }
}

TEST_CASE("arpf fractions") {
  SUBCASE("clamped circuit passes its surplus on") {
    const std::vector<Cells> q{20, 40};
    const std::vector<double> h{2, 1};
    const auto l = arpf_fractions(q, h, 30);
    CHECK(l[0] == doctest::Approx(1.0));
    CHECK(l[1] == doctest::Approx(0.25));
  }
  SUBCASE("second example") {
    const std::vector<Cells> q{10, 40};
    const std::vector<double> h{3, 1};
    const auto l = arpf_fractions(q, h, 40);
    CHECK(l[0] == doctest::Approx(1.0));
    CHECK(l[1] == doctest::Approx(0.75));
  }
  SUBCASE("single circuit") {
    const std::vector<Cells> q{50};
    const std::vector<double> h{0.1};
    CHECK(arpf_fractions(q, h, 30)[0] == doctest::Approx(0.6));
  }
  SUBCASE("empty queues get nothing") {
    const std::vector<Cells> q{0, 40};
    const std::vector<double> h{5, 1};
    const auto l = arpf_fractions(q, h, 10);
    CHECK(l[0] == 0.0);
    CHECK(l[1] == doctest::Approx(0.25));
  }
}

TEST_CASE("arpf schedule integerizes the fractions") {
  SimConfig cfg;
  auto circuits = queues_of({20, 40});
  std::vector<RateTracker> trackers(2);
  trackers[0].h = 2;
  trackers[1].h = 1;
  CHECK(arpf_schedule(circuits, trackers, 30, cfg).cells == std::vector<Cells>{20, 10});
}

TEST_CASE("arpf unclamped allocations follow the ratio of h") {
  std::mt19937_64 rng(23);
  SimConfig cfg;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = draw(rng, 2, 10);
    std::vector<Cells> q(n);
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] = draw(rng, 0, 500);
      h[i] = draw_log(rng, 1e-4, 10.0);
    }
    const Cells free = draw(rng, 1, 600);
    const auto l = arpf_fractions(q, h, free);
    double given = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(l[i] >= 0.0);
      CHECK(l[i] <= 1.0);
      given += l[i] * static_cast<double>(q[i]);
    }
    CHECK(given == doctest::Approx(std::min<double>(free, sum_of(q))).epsilon(1e-9));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (q[i] == 0 || q[j] == 0 || l[i] >= 1.0 || l[j] >= 1.0) continue;
        const double ratio = (l[i] * q[i]) / (l[j] * q[j]);
        CHECK(ratio == doctest::Approx(h[i] / h[j]).epsilon(1e-9));
      }
      // A clamped circuit would have received at least its queue.
      if (q[i] > 0 && l[i] >= 1.0) {
        for (std::size_t j = 0; j < n; ++j) {
          if (q[j] > 0 && l[j] < 1.0) {
            CHECK(h[i] / h[j] >= (static_cast<double>(q[i]) / (l[j] * q[j])) * (1 - 1e-9));
          }
        }
      }
    }
  }
}

TEST_CASE("every scheduler respects queue, buffer and work conservation") {
  std::mt19937_64 rng(31);
  SimConfig cfg;
  for (int trial = 0; trial < 3000; ++trial) {
    const auto circuits = random_circuits(rng, draw(rng, 0, 12), 400);
    const auto trackers = random_trackers(rng, circuits, cfg);
    const Cells free = draw(rng, 0, 2 * cfg.buffer_capacity_cells);
    Cells demand = 0;
    for (const auto& c : circuits) demand += c.queue_cells;
    for (auto kind : kAllSchedulers) {
      RoundRobinCursor cursor;
      if (!circuits.empty() && draw(rng, 0, 1) == 1) cursor.last_served = draw(rng, 0, circuits.size() - 1);
      const auto d = schedule(kind, circuits, trackers, free, cfg, cursor);
      REQUIRE(d.cells.size() == circuits.size());
      REQUIRE(d.lambdas.size() == circuits.size());
      for (std::size_t i = 0; i < circuits.size(); ++i) {
        CHECK(d.cells[i] <= circuits[i].queue_cells);
        CHECK(d.lambdas[i] >= 0.0);
        CHECK(d.lambdas[i] <= 1.0);
        if (circuits[i].queue_cells == 0) CHECK(d.cells[i] == 0);
      }
      CHECK(d.total_cells() == std::min(free, demand));
    }
  }
}

TEST_CASE("arpf equalizes two identical backlogged circuits over time") {
  SimConfig cfg;
  WorkloadSpec w;
  w.ctype = CircuitType::Bulk;
  w.bulk_total_bytes = 500 * kMiB;
  w.arrival_rate_cells_per_tick = 48;  // 96 cells/tick in, 48 out
  const std::vector<WorkloadSpec> workloads{w, w};
  Simulation sim(cfg, workloads, SchedulerKind::ArPf);
  for (int t = 0; t < 10000; ++t) sim.step();
  const auto& c = sim.circuits();
  REQUIRE(c[0].queue_cells > 0);
  REQUIRE(c[1].queue_cells > 0);
  const double a = static_cast<double>(c[0].flushed_total);
  const double b = static_cast<double>(c[1].flushed_total);
  CHECK(std::abs(a - b) / (0.5 * (a + b)) < 0.01);
}
