#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "circsched/optsched.hpp"
#include "test_support.hpp"

using namespace circsched;
using namespace circsched::testing;

namespace {

double total(const std::vector<double>& u) { return std::accumulate(u.begin(), u.end(), 0.0); }

Cells cap_sum(const WaterfillProblem& p) {
  return std::accumulate(p.caps.begin(), p.caps.end(), Cells{0});
}

}  // namespace

TEST_CASE("water-filling examples") {
  SUBCASE("budget binds, both interior") {
    const WaterfillProblem p{{2.0, 1.0}, {100, 100}, 50};
    const auto s = waterfill_solve_detailed(p);
    CHECK(s.u[0] == doctest::Approx(25.25).epsilon(1e-12));
    CHECK(s.u[1] == doctest::Approx(24.75).epsilon(1e-12));
    CHECK(1.0 / s.nu == doctest::Approx(25.75).epsilon(1e-12));
  }
  SUBCASE("weak circuit gets nothing when the budget is small") {
    // Level 1.1 stays below 1/0.5, so the second circuit is inactive.
    const WaterfillProblem p{{10.0, 0.5}, {100, 100}, 0};
    const auto u = waterfill_solve(WaterfillProblem{{10.0, 0.5}, {100, 100}, 1});
    CHECK(u[0] == doctest::Approx(1.0));
    CHECK(u[1] == doctest::Approx(0.0));
    CHECK(total(waterfill_solve(p)) == 0.0);
  }
  SUBCASE("slack budget fills every queue") {
    const WaterfillProblem p{{2.0, 1.0, 0.5}, {10, 20, 30}, 100};
    const auto s = waterfill_solve_detailed(p);
    CHECK(s.u == std::vector<double>{10.0, 20.0, 30.0});
    CHECK(s.nu == 0.0);
  }
  SUBCASE("single circuit takes the whole budget") {
    const auto u = waterfill_solve(WaterfillProblem{{0.3}, {50}, 30});
    CHECK(u[0] == doctest::Approx(30.0));
  }
  SUBCASE("cap binds and the rest goes to the other circuit") {
    const auto u = waterfill_solve(WaterfillProblem{{5.0, 5.0}, {3, 100}, 50});
    CHECK(u[0] == doctest::Approx(3.0));
    CHECK(u[1] == doctest::Approx(47.0));
  }
  SUBCASE("empty problem") {
    CHECK(waterfill_solve(WaterfillProblem{}).empty());
  }
}

TEST_CASE("problem validation") {
  CHECK_THROWS_AS(validate(WaterfillProblem{{1.0}, {1, 2}, 3}), std::invalid_argument);
  CHECK_THROWS_AS(validate(WaterfillProblem{{0.0}, {1}, 3}), std::invalid_argument);
  CHECK_THROWS_AS(validate(WaterfillProblem{{-1.0}, {1}, 3}), std::invalid_argument);
  CHECK_NOTHROW(validate(WaterfillProblem{{1.0}, {0}, 0}));
}

TEST_CASE("objective") {
  const WaterfillProblem p{{2.0, 1.0}, {100, 100}, 50};
  const std::vector<double> u{1.0, 3.0};
  CHECK(pf_objective(p, u) == doctest::Approx(std::log(3.0) + std::log(4.0)));
}

TEST_CASE("solver matches the reference solvers") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = random_problem(rng, draw(rng, 1, 4));
    const auto u = waterfill_solve(p);
    const auto ref = oracle_solve(p, 11);
    CHECK(pf_objective(p, u) >= pf_objective(p, ref) - 1e-6);
    const auto grad = oracle_solve_gradient(p);
    CHECK(pf_objective(p, u) >= pf_objective(p, grad) - 1e-6);
  }
}

TEST_CASE("gradient reference agrees on larger problems") {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_problem(rng, draw(rng, 5, 12));
    const auto u = waterfill_solve(p);
    const auto ref = oracle_solve_gradient(p);
    CHECK(pf_objective(p, u) >= pf_objective(p, ref) - 1e-6);
    // The reference is not vacuous: it reaches the same optimum.
    CHECK(pf_objective(p, ref) >= pf_objective(p, u) - 1e-6);
  }
}

TEST_CASE("references reproduce the worked example") {
  const WaterfillProblem p{{2.0, 1.0}, {100, 100}, 50};
  const auto g = oracle_solve_gradient(p);
  CHECK(g[0] == doctest::Approx(25.25).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(24.75).epsilon(1e-6));
  const auto coarse = oracle_solve_grid(p, 101);
  CHECK(coarse[0] + coarse[1] == doctest::Approx(50.0));
  CHECK(std::abs(coarse[0] - 25.25) <= 1.0);
}

TEST_CASE("grid reference refuses more than four circuits") {
  std::mt19937_64 rng(1);
  const auto p = random_problem(rng, 5);
  CHECK_THROWS_AS(oracle_solve_grid(p, 5), UnsupportedProblemSize);
}

TEST_CASE("solution satisfies the optimality conditions") {
  std::mt19937_64 rng(107);
  for (int trial = 0; trial < 3000; ++trial) {
    const auto p = random_problem(rng, draw(rng, 1, 30));
    const auto s = waterfill_solve_detailed(p);
    const auto r = kkt_report(p, s.u, s.nu);
    CHECK(r.stationarity <= 1e-9);
    CHECK(r.budget_gap <= 1e-9 * std::max(1.0, static_cast<double>(p.budget)));
    CHECK(r.bound_violation <= 0.0);
    CHECK(s.iterations <= kMaxBisectionSteps);
  }
}

TEST_CASE("bisection converges across extreme gain ranges") {
  std::mt19937_64 rng(109);
  for (int trial = 0; trial < 1000; ++trial) {
    WaterfillProblem p;
    const std::size_t n = draw(rng, 1, 20);
    for (std::size_t i = 0; i < n; ++i) {
      p.gains.push_back(draw_log(rng, 1e-6, 1e6));
      p.caps.push_back(draw(rng, 0, 20000));
    }
    p.budget = draw(rng, 0, cap_sum(p));
    const auto s = waterfill_solve_detailed(p);
    CHECK(s.iterations <= kMaxBisectionSteps);
    const auto r = kkt_report(p, s.u, s.nu);
    CHECK(r.stationarity <= 1e-9);
    CHECK(r.budget_gap <= 1e-9 * std::max(1.0, static_cast<double>(p.budget)));
    CHECK(r.bound_violation <= 0.0);
  }
}

TEST_CASE("more budget never takes cells away") {
  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_problem(rng, draw(rng, 1, 10));
    const auto before = waterfill_solve(p);
    p.budget += draw(rng, 1, 50);
    const auto after = waterfill_solve(p);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] >= before[i] - 1e-9);
  }
}

TEST_CASE("higher gain never lowers a circuit's own allocation") {
  std::mt19937_64 rng(127);
  for (int trial = 0; trial < 1000; ++trial) {
    auto p = random_problem(rng, draw(rng, 1, 10));
    const std::size_t k = draw(rng, 0, p.gains.size() - 1);
    const auto before = waterfill_solve(p);
    p.gains[k] *= draw_real(rng, 1.0, 4.0);
    const auto after = waterfill_solve(p);
    CHECK(after[k] >= before[k] - 1e-9);
  }
}

TEST_CASE("no feasible perturbation improves the optimum") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_problem(rng, draw(rng, 2, 8));
    const auto u = waterfill_solve(p);
    const double best = pf_objective(p, u);
    for (int k = 0; k < 100; ++k) {
      // Move mass from one circuit to another, staying inside the box.
      const std::size_t from = draw(rng, 0, u.size() - 1);
      const std::size_t to = draw(rng, 0, u.size() - 1);
      auto v = u;
      const double room = static_cast<double>(p.caps[to]) - v[to];
      const double amount = std::min(v[from], room) * draw_real(rng, 0.0, 1.0);
      v[from] -= amount;
      v[to] += amount;
      CHECK(pf_objective(p, v) <= best + 1e-9);
      // Dropping mass is always feasible and never helps either.
      auto w = u;
      w[from] *= draw_real(rng, 0.0, 1.0);
      CHECK(pf_objective(p, w) <= best + 1e-12);
    }
  }
}

TEST_CASE("optpf schedule") {
  SimConfig cfg;
  std::vector<CircuitState> circuits(3);
  circuits[0].ctype = CircuitType::Web;
  circuits[0].queue_cells = 100;
  circuits[1].ctype = CircuitType::Bulk;
  circuits[1].queue_cells = 100;
  circuits[2].ctype = CircuitType::Web;
  circuits[2].queue_cells = 0;

  SUBCASE("fills the buffer and favors the higher priority") {
    const auto d = optpf_schedule(circuits, 50, cfg);
    CHECK(d.total_cells() == 50);
    CHECK(d.cells[0] >= d.cells[1]);
    CHECK(d.cells[2] == 0);
    CHECK(d.lambdas[2] == 0.0);
  }
  SUBCASE("matches the continuous optimum") {
    const WaterfillProblem p{{priority(circuits[0], cfg) / cfg.tick_ms,
                              priority(circuits[1], cfg) / cfg.tick_ms},
                             {100, 100},
                             50};
    const auto u = waterfill_solve(p);
    const auto d = optpf_schedule(circuits, 50, cfg);
    CHECK(d.lambdas[0] == doctest::Approx(u[0] / 100.0));
    CHECK(d.lambdas[1] == doctest::Approx(u[1] / 100.0));
    CHECK(std::abs(static_cast<double>(d.cells[0]) - u[0]) < 1.0);
  }
  SUBCASE("room for everything") {
    const auto d = optpf_schedule(circuits, 500, cfg);
    CHECK(d.cells == std::vector<Cells>{100, 100, 0});
    CHECK(d.lambdas[0] == 1.0);
  }
  SUBCASE("no room") {
    CHECK(optpf_schedule(circuits, 0, cfg).total_cells() == 0);
  }
}
