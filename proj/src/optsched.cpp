#include "circsched/optsched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace circsched {

void validate(const WaterfillProblem& p) {
  if (p.gains.size() != p.caps.size()) {
    throw std::invalid_argument("waterfill problem: gains and caps differ in length");
  }
  for (double a : p.gains) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("waterfill problem: gains must be positive and finite");
    }
  }
}

double pf_objective(const WaterfillProblem& p, std::span<const double> u) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) total += std::log1p(p.gains[i] * u[i]);
  return total;
}

namespace {

double fill_at_level(const WaterfillProblem& p, double level, std::vector<double>& u) {
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = std::clamp(level - 1.0 / p.gains[i], 0.0, static_cast<double>(p.caps[i]));
    total += u[i];
  }
  return total;
}

// Solves for the level once the active set is known. Returns the bisection
// level unchanged if the closed form disagrees with that set.
double polish_level(const WaterfillProblem& p, double level, double target) {
  double fixed = 0.0;
  double inv_sum = 0.0;
  std::size_t interior = 0;
  for (std::size_t i = 0; i < p.gains.size(); ++i) {
    const double inv = 1.0 / p.gains[i];
    const double cap = static_cast<double>(p.caps[i]);
    if (level <= inv) continue;
    if (level - inv >= cap) {
      fixed += cap;
    } else {
      inv_sum += inv;
      ++interior;
    }
  }
  if (interior == 0) return level;
  const double exact = (target - fixed + inv_sum) / static_cast<double>(interior);
  for (std::size_t i = 0; i < p.gains.size(); ++i) {
    const double inv = 1.0 / p.gains[i];
    const double cap = static_cast<double>(p.caps[i]);
    const bool was_interior = level > inv && level - inv < cap;
    if (was_interior && (exact < inv || exact - inv > cap)) return level;
  }
  return exact;
}

}  // namespace

WaterfillSolution waterfill_solve_detailed(const WaterfillProblem& p, double tol) {
  validate(p);
  const std::size_t n = p.gains.size();
  WaterfillSolution sol;
  sol.u.assign(n, 0.0);
  if (n == 0 || p.budget == 0) {
    sol.nu = n == 0 ? 0.0 : *std::max_element(p.gains.begin(), p.gains.end());
    return sol;
  }

  const Cells demand = std::accumulate(p.caps.begin(), p.caps.end(), Cells{0});
  if (demand <= p.budget) {
    for (std::size_t i = 0; i < n; ++i) sol.u[i] = static_cast<double>(p.caps[i]);
    return sol;
  }

  const double target = static_cast<double>(p.budget);
  // At nu = hi every u is zero; at nu = lo every u sits at its cap.
  double hi = *std::max_element(p.gains.begin(), p.gains.end());
  double lo = hi;
  for (std::size_t i = 0; i < n; ++i) {
    lo = std::min(lo, 1.0 / (static_cast<double>(p.caps[i]) + 1.0 / p.gains[i]));
  }

  double nu = hi;
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    nu = hi / lo > 4.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    sol.iterations = step + 1;
    const double filled = fill_at_level(p, 1.0 / nu, sol.u);
    if (std::abs(filled - target) < tol) break;
    if (filled > target) {
      lo = nu;
    } else {
      hi = nu;
    }
  }

  const double level = polish_level(p, 1.0 / nu, target);
  fill_at_level(p, level, sol.u);
  sol.nu = 1.0 / level;
  return sol;
}

std::vector<double> waterfill_solve(const WaterfillProblem& p, double tol) {
  return waterfill_solve_detailed(p, tol).u;
}

std::vector<double> oracle_solve_grid(const WaterfillProblem& p, std::size_t grid) {
  validate(p);
  const std::size_t n = p.gains.size();
  if (n > kMaxGridCircuits) {
    throw UnsupportedProblemSize("grid oracle supports at most " +
                                 std::to_string(kMaxGridCircuits) + " circuits, got " +
                                 std::to_string(n));
  }
  if (grid < 2) throw std::invalid_argument("grid oracle needs at least 2 points per axis");

  std::vector<double> best(n, 0.0);
  if (n == 0) return best;
  double best_value = pf_objective(p, best);

  const double budget = static_cast<double>(p.budget);
  std::vector<std::size_t> index(n, 0);
  std::vector<double> u(n);
  while (true) {
    double used = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lambda = static_cast<double>(index[i]) / static_cast<double>(grid - 1);
      u[i] = lambda * static_cast<double>(p.caps[i]);
      used += u[i];
    }
    if (used > budget) {
      const double scale = budget / used;
      for (double& v : u) v *= scale;
    }
    const double value = pf_objective(p, u);
    if (value > best_value) {
      best_value = value;
      best = u;
    }

    std::size_t axis = 0;
    while (axis < n && ++index[axis] == grid) index[axis++] = 0;
    if (axis == n) break;
  }
  return best;
}

namespace {

// Projection onto {0 <= u <= caps, sum u <= budget} in the norm
// sum_i w[i] * (u[i] - v[i])^2. Unit weights give the Euclidean projection.
std::vector<double> project(const WaterfillProblem& p, std::span<const double> v,
                            std::span<const double> w) {
  const std::size_t n = v.size();
  std::vector<double> out(n);
  auto shifted = [&](double shift) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double weight = w.empty() ? 1.0 : w[i];
      out[i] = std::clamp(v[i] - shift / weight, 0.0, static_cast<double>(p.caps[i]));
      total += out[i];
    }
    return total;
  };
  const double budget = static_cast<double>(p.budget);
  if (shifted(0.0) <= budget) return out;
  double lo = 0.0;
  double hi = 1.0;
  while (shifted(hi) > budget) hi *= 2.0;
  for (int i = 0; i < 300 && hi - lo > 1e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (shifted(mid) > budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  shifted(hi);
  return out;
}

}  // namespace

// Scaled projected gradient ascent. The scaling is the diagonal of the
// negated Hessian, so a unit step is a projected Newton step; backtracking
// keeps every accepted step an ascent step.
std::vector<double> oracle_solve_gradient(const WaterfillProblem& p,
                                          std::span<const double> start) {
  validate(p);
  const std::size_t n = p.gains.size();
  std::vector<double> u;
  if (start.size() == n) {
    u = project(p, start, {});
  } else {
    std::vector<double> even(n, static_cast<double>(p.budget) / std::max<std::size_t>(n, 1));
    u = project(p, even, {});
  }
  if (n == 0) return u;

  double value = pf_objective(p, u);
  std::vector<double> grad(n);
  std::vector<double> weight(n);
  std::vector<double> trial(n);
  for (int iter = 0; iter < 10000; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = 1.0 + p.gains[i] * u[i];
      grad[i] = p.gains[i] / denom;
      weight[i] = grad[i] * grad[i];
    }

    std::vector<double> next;
    double next_value = value;
    bool accepted = false;
    double step = 1.0;
    for (int shrink = 0; shrink < 80; ++shrink) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + step * grad[i] / weight[i];
      next = project(p, trial, weight);
      next_value = pf_objective(p, next);
      double gain_bound = 0.0;
      double dist2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = next[i] - u[i];
        gain_bound += grad[i] * d;
        dist2 += weight[i] * d * d;
      }
      // Sufficient increase in the scaled metric.
      if (next_value >= value + 0.5 * (gain_bound - dist2 / (2.0 * step))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(next[i] - u[i]));
    if (next_value >= value) {
      u = std::move(next);
      value = next_value;
    }
    if (moved < 1e-10) break;
  }
  return u;
}

std::vector<double> oracle_solve(const WaterfillProblem& p, std::size_t grid) {
  const auto coarse = oracle_solve_grid(p, grid);
  const auto refined = oracle_solve_gradient(p, coarse);
  return pf_objective(p, refined) >= pf_objective(p, coarse) ? refined : coarse;
}

ScheduleDecision optpf_schedule(std::span<const CircuitState> circuits, Cells free,
                                const SimConfig& cfg) {
  const std::size_t n = circuits.size();
  ScheduleDecision decision = zero_decision(n);

  WaterfillProblem problem;
  problem.budget = free;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i) {
    if (circuits[i].queue_cells == 0) continue;
    active.push_back(i);
    problem.gains.push_back(priority(circuits[i], cfg) / cfg.tick_ms);
    problem.caps.push_back(circuits[i].queue_cells);
  }
  if (active.empty() || free == 0) return decision;

  const auto u = waterfill_solve(problem);
  std::vector<double> allocation(n, 0.0);
  std::vector<Cells> queues(n);
  for (std::size_t i = 0; i < n; ++i) queues[i] = circuits[i].queue_cells;
  for (std::size_t k = 0; k < active.size(); ++k) {
    const std::size_t i = active[k];
    allocation[i] = u[k];
    decision.lambdas[i] = std::min(1.0, u[k] / static_cast<double>(queues[i]));
  }
  decision.cells = integerize(allocation, queues, free);
  return decision;
}

}  // namespace circsched
