#pragma once

#include <cstddef>
#include <functional>

#include "hao/model.hpp"
#include "hao/pwc.hpp"

namespace hao {

class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Supplies the value function of a successor discrete state. Must throw
/// ContractError (or return a valid function) for every state asked for.
using ValueLookup = std::function<const PwcFunction&(const DiscreteState&)>;

struct QResult {
  std::size_t action;
  /// Expected return of the action; kNotApplicable outside applicability ∩ region.
  PwcFunction q;
};

/// Exact expected return of one action over `region`: Σ_branch Σ_outcome
/// p · (R(arrival) + V'(arrival)). Relative outcomes pull V' back by the delta;
/// absolute outcomes contribute a constant.
QResult q_value(const HybridProblem& problem, const DiscreteState& n, std::size_t action, const PwcFunction& region,
                const ValueLookup& successor_values, bool with_reward = true);

struct BackupResult {
  /// Backed-up value on the region, 0 elsewhere (and on terminal sub-regions).
  PwcFunction value;
  /// Best action on the non-terminal part of the region, kNoAction elsewhere.
  TagFunction policy;
};

/// Max over executable actions of q_value, restricted to `region`. Ties prefer
/// the action `marked` already holds at the point.
BackupResult bellman_backup(const HybridProblem& problem, const DiscreteState& n, const PwcFunction& region,
                            const ValueLookup& successor_values, const TagFunction* marked = nullptr);

/// Value of following `policy` (fixed actions) over `region`; 0 elsewhere.
PwcFunction policy_backup(const HybridProblem& problem, const DiscreteState& n, const TagFunction& policy,
                          const PwcFunction& region, const ValueLookup& successor_values, bool with_reward);

/// Indicator of resource levels in n' reachable from `source` in n with one
/// application of the action. Absolute arrivals and images of the top face
/// are represented by cells of width c_min / 2.
PwcFunction reach_image(const HybridProblem& problem, const DiscreteState& n, const PwcFunction& source,
                        std::size_t action, const DiscreteState& successor);

/// Successor discrete states of an action from n, ascending, without duplicates.
std::vector<DiscreteState> successors(const HybridProblem& problem, const DiscreteState& n, std::size_t action);

}  // namespace hao
