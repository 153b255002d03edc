#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hao/model.hpp"

namespace hao {

class OracleOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultOracleCap = 1'000'000;
/// Points closer than this per coordinate are the same hybrid state.
inline constexpr double kPointKeyTolerance = 1e-12;

struct OracleTransition {
  std::size_t action;
  double probability;
  double reward;
  std::size_t target;
};

struct OracleState {
  DiscreteState n;
  Point x;
  bool terminal = false;
  double value = 0.0;
  int best_action = kNoAction;
  /// Outgoing transitions: transitions[begin, end), grouped by action.
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Every hybrid state reachable from a start state by any action sequence.
class OracleTable {
 public:
  const std::vector<OracleState>& states() const { return states_; }
  const std::vector<OracleTransition>& transitions() const { return transitions_; }
  std::size_t size() const { return states_.size(); }
  const OracleState& root() const { return states_.front(); }
  std::optional<std::size_t> find(const DiscreteState& n, std::span<const double> x) const;

  /// Expected return of `action` in state i given the current values;
  /// kNotApplicable if the action is not executable there.
  double q_value(std::size_t i, std::size_t action) const;

  /// Actions executable in state i, ascending.
  std::vector<std::size_t> actions(std::size_t i) const;

 private:
  friend OracleTable enumerate_reachable(const HybridProblem&, const DiscreteState&, const Point&, std::size_t);
  friend void backward_induction(OracleTable&);

  using Key = std::pair<DiscreteState, std::vector<std::int64_t>>;
  static Key key(const DiscreteState& n, std::span<const double> x);

  std::vector<OracleState> states_;
  std::vector<OracleTransition> transitions_;
  std::map<Key, std::size_t> index_;
};

/// Forward enumeration from (n, x). Throws OracleOverflow beyond `cap` states.
OracleTable enumerate_reachable(const HybridProblem& problem, const DiscreteState& n, const Point& x,
                                std::size_t cap = kDefaultOracleCap);
inline OracleTable enumerate_reachable(const HybridProblem& problem, std::size_t cap = kDefaultOracleCap) {
  return enumerate_reachable(problem, problem.initial_state, problem.initial_point, cap);
}

/// Fills values and best actions, children before parents.
void backward_induction(OracleTable& table);

/// enumerate_reachable followed by backward_induction.
OracleTable solve_exact(const HybridProblem& problem, std::size_t cap = kDefaultOracleCap);
OracleTable solve_exact(const HybridProblem& problem, const DiscreteState& n, const Point& x,
                        std::size_t cap = kDefaultOracleCap);

/// One row per state: fluents_hex, x_1..x_d, value, action.
void write_oracle_csv(std::ostream& out, const HybridProblem& problem, const OracleTable& table);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trials = 0;
};

/// Runs the table's greedy policy from the root, trial i drawing from stream (seed, i).
MonteCarloEstimate evaluate_greedy(const OracleTable& table, std::size_t trials, std::uint64_t seed);

}  // namespace hao
