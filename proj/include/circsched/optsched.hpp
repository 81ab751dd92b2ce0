#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "circsched/model.hpp"

namespace circsched {

/// maximize   sum_i log(1 + gains[i] * u[i])
/// subject to sum_i u[i] <= budget,  0 <= u[i] <= caps[i]
///
/// u[i] is the number of cells taken from circuit i (lambda_i * queue_i),
/// gains[i] = gamma_i / tick_ms.
struct WaterfillProblem {
  std::vector<double> gains;
  std::vector<Cells> caps;
  Cells budget = 0;
};

/// Throws std::invalid_argument on mismatched lengths or non-positive gains.
void validate(const WaterfillProblem& p);

double pf_objective(const WaterfillProblem& p, std::span<const double> u);

struct WaterfillSolution {
  std::vector<double> u;
  double nu = 0.0;      // budget multiplier; 0 when the budget is slack
  int iterations = 0;   // bisection steps taken
};

inline constexpr double kDefaultWaterfillTol = 1e-9;
inline constexpr int kMaxBisectionSteps = 200;

/// Exact KKT solution u[i] = clamp(1/nu - 1/gains[i], 0, caps[i]); nu is
/// located by bisection and the water level is then recomputed in closed form
/// from the resulting active set.
WaterfillSolution waterfill_solve_detailed(const WaterfillProblem& p,
                                           double tol = kDefaultWaterfillTol);

std::vector<double> waterfill_solve(const WaterfillProblem& p,
                                    double tol = kDefaultWaterfillTol);

// Reference solvers. They share nothing with waterfill_solve beyond the
// objective and are only meant for verification.

class UnsupportedProblemSize : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxGridCircuits = 4;

/// Exhaustive search over lambda on `grid` evenly spaced points per axis in
/// [0, 1]. Points over budget are scaled back onto the budget plane. Throws
/// UnsupportedProblemSize for more than kMaxGridCircuits circuits.
std::vector<double> oracle_solve_grid(const WaterfillProblem& p, std::size_t grid);

/// Diagonally scaled projected gradient ascent with backtracking from `start`
/// (or a feasible default when empty), until no coordinate moves by more than
/// 1e-10.
std::vector<double> oracle_solve_gradient(const WaterfillProblem& p,
                                          std::span<const double> start = {});

/// Grid search followed by gradient refinement from the best grid point.
std::vector<double> oracle_solve(const WaterfillProblem& p, std::size_t grid);

/// Builds the water-filling problem over the non-empty circuits with gains
/// priority / tick_ms and budget `free`, and integerizes the optimum.
ScheduleDecision optpf_schedule(std::span<const CircuitState> circuits, Cells free,
                                const SimConfig& cfg);

}  // namespace circsched
