#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hao/discrete_state.hpp"
#include "hao/pwc.hpp"

namespace hao {

/// Default minimal consumption per step, in resource units.
inline constexpr double kDefaultMinConsumption = 1e-3;

/// The resource hypercube [0, max_1] x ... x [0, max_d].
struct ResourceSpace {
  std::vector<double> max;
  std::vector<std::string> names;

  std::size_t dims() const { return max.size(); }
  bool contains(std::span<const double> x) const;
};

enum class EffectKind { kRelative, kAbsolute };

struct Outcome {
  double probability = 1.0;
  StateEffect effect;
  EffectKind kind = EffectKind::kRelative;
  /// Resource delta (relative) or arrival point (absolute).
  std::vector<double> resources;
  /// Reward earned on arrival, as a function of the arrival resources.
  PwcFunction reward;
};

struct Branch {
  Box region;
  std::vector<Outcome> outcomes;
};

struct ActionSpec {
  std::string name;
  StatePattern source;
  /// Minimum-resource executability region.
  Box applicability;
  std::vector<Branch> branches;

  /// The branch whose region owns x, or nullptr.
  const Branch* branch_at(std::span<const double> x) const;
};

struct Goal {
  std::string name;
  double reward = 0.0;
  /// Heuristic pruning hint: once `lock` is set while `requires` is clear, the
  /// goal can no longer be achieved.
  std::optional<std::size_t> requires_fluent;
  std::optional<std::size_t> lock_fluent;
};

/// Hybrid-state MDP with monotonically consumed resources.
///
/// Fluent names include the goal-achieved bits as the last goals.size() entries.
struct HybridProblem {
  ResourceSpace space;
  std::vector<std::string> fluent_names;
  std::vector<Goal> goals;
  std::vector<ActionSpec> actions;
  DiscreteState initial_state;
  Point initial_point;
  double c_min = kDefaultMinConsumption;

  std::size_t fluent_count() const { return fluent_names.size(); }
  std::size_t goal_fluent(std::size_t g) const { return fluent_names.size() - goals.size() + g; }
  std::optional<std::size_t> fluent_index(const std::string& name) const;
  std::vector<double> goal_rewards() const;
};

struct Violation {
  std::string action;  // empty for problem-level violations
  std::string message;

  std::string to_string() const { return action.empty() ? message : action + ": " + message; }
};

/// Lists every structural violation; an empty report means the problem
/// satisfies the hypotheses the solver relies on.
std::vector<Violation> validate_problem(const HybridProblem& problem);

/// Actions whose source pattern matches n, regardless of resources.
std::vector<std::size_t> matching_actions(const HybridProblem& problem, const DiscreteState& n);

/// Actions executable in (n, x). Throws DomainError if x is outside the hypercube.
std::vector<std::size_t> executable_actions(const HybridProblem& problem, const DiscreteState& n,
                                            std::span<const double> x);

bool is_terminal(const HybridProblem& problem, const DiscreteState& n, std::span<const double> x);

/// Indicator of the resource levels where n has at least one executable action.
PwcFunction nonterminal_region(const HybridProblem& problem, const DiscreteState& n);

/// Resources after the outcome: x + delta or the absolute point.
Point arrival_point(const Outcome& outcome, std::span<const double> x);

}  // namespace hao
