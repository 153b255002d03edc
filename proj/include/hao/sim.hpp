#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "hao/model.hpp"
#include "hao/search.hpp"

namespace hao {

enum class Termination { kTerminal, kFringe };

const char* to_string(Termination t);

struct TrajectoryStep {
  DiscreteState state;
  Point x;
  std::size_t action;
  std::size_t outcome;  // index within the branch's outcome list
  DiscreteState next_state;
  Point next_x;
  double reward;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  double total_return = 0.0;
  Termination termination = Termination::kTerminal;
};

/// Executes the solution's policy from the start state. Stops at a terminal
/// state, or where the policy graph has no closed region covering the state
/// (done at the fringe). Throws ContractError if a closed region has no action.
Trajectory simulate_trajectory(const HybridProblem& problem, const Solution& solution, std::uint64_t seed,
                               std::uint64_t stream = 0);

struct PolicyEvaluation {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
  std::size_t fringe_stops = 0;
  /// Fraction of trials ending with each goal achieved.
  std::vector<double> goal_rates;
};

/// Trial i runs on stream (seed, i); `jobs` threads share the trials and the
/// results are reduced in trial order.
PolicyEvaluation evaluate_policy(const HybridProblem& problem, const Solution& solution, std::size_t trials,
                                 std::uint64_t seed, std::size_t jobs = 1);

void write_trajectory_csv(std::ostream& out, const HybridProblem& problem, const Trajectory& trajectory);

}  // namespace hao
