#pragma once

#include <cstddef>
#include <cstdint>

#include "hao/model.hpp"

namespace hao {

/// Shape of a randomly generated small problem. Resource coordinates are
/// integers, so arrival points are computed exactly in floating point.
struct RandomProblemParams {
  std::size_t plain_fluents = 3;  // non-goal fluents, at most 4 in the test suites
  std::size_t goals = 2;
  std::size_t dims = 2;
  std::size_t min_actions = 3;
  std::size_t max_actions = 6;
  std::size_t max_outcomes = 3;
  int min_resource = 8;
  int max_resource = 14;
  int max_step = 3;
  double absolute_probability = 0.15;
  double split_probability = 0.3;
  double stepped_reward_probability = 0.3;
};

HybridProblem make_random_problem(const RandomProblemParams& params, std::uint64_t seed);

}  // namespace hao
