#include "hao/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "hao/rng.hpp"

namespace hao {

OracleTable::Key OracleTable::key(const DiscreteState& n, std::span<const double> x) {
  std::vector<std::int64_t> k(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) k[i] = std::llround(x[i] / kPointKeyTolerance);
  return {n, std::move(k)};
}

std::optional<std::size_t> OracleTable::find(const DiscreteState& n, std::span<const double> x) const {
  auto it = index_.find(key(n, x));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double OracleTable::q_value(std::size_t i, std::size_t action) const {
  const OracleState& s = states_.at(i);
  double q = 0.0;
  bool found = false;
  for (std::size_t t = s.begin; t < s.end; ++t) {
    const OracleTransition& tr = transitions_[t];
    if (tr.action != action) continue;
    found = true;
    q += tr.probability * (tr.reward + states_[tr.target].value);
  }
  return found ? q : kNotApplicable;
}

std::vector<std::size_t> OracleTable::actions(std::size_t i) const {
  std::vector<std::size_t> out;
  const OracleState& s = states_.at(i);
  for (std::size_t t = s.begin; t < s.end; ++t)
    if (out.empty() || out.back() != transitions_[t].action) out.push_back(transitions_[t].action);
  return out;
}

OracleTable enumerate_reachable(const HybridProblem& problem, const DiscreteState& n, const Point& x,
                                std::size_t cap) {
  if (!problem.space.contains(x)) throw DomainError("initial point outside the resource space");
  OracleTable table;
  auto intern = [&](const DiscreteState& s, Point p) {
    auto k = OracleTable::key(s, p);
    auto it = table.index_.find(k);
    if (it != table.index_.end()) return it->second;
    if (table.states_.size() >= cap)
      throw OracleOverflow("oracle enumeration exceeded " + std::to_string(cap) + " hybrid states");
    table.states_.push_back({s, std::move(p)});
    table.index_.emplace(std::move(k), table.states_.size() - 1);
    return table.states_.size() - 1;
  };

  intern(n, x);
  // States are appended in discovery order, so a plain cursor is a FIFO queue.
  for (std::size_t i = 0; i < table.states_.size(); ++i) {
    const DiscreteState s = table.states_[i].n;
    const Point p = table.states_[i].x;
    const auto executable = executable_actions(problem, s, p);
    table.states_[i].terminal = executable.empty();
    table.states_[i].begin = table.transitions_.size();
    for (std::size_t a : executable) {
      const Branch* branch = problem.actions[a].branch_at(p);
      if (branch == nullptr) continue;
      for (const Outcome& o : branch->outcomes) {
        Point arrival = arrival_point(o, p);
        const double reward = o.reward(arrival);
        const std::size_t target = intern(o.effect.apply(s), std::move(arrival));
        table.transitions_.push_back({a, o.probability, reward, target});
      }
    }
    table.states_[i].end = table.transitions_.size();
  }
  return table;
}

void backward_induction(OracleTable& table) {
  auto& states = table.states_;
  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), 0);
  auto total = [&](std::size_t i) { return std::accumulate(states[i].x.begin(), states[i].x.end(), 0.0); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return total(a) < total(b); });
  for (std::size_t i : order) {
    OracleState& s = states[i];
    s.value = 0.0;
    s.best_action = kNoAction;
    if (s.terminal) continue;
    double best = kNotApplicable;
    for (std::size_t a : table.actions(i)) {
      const double q = table.q_value(i, a);
      if (q > best) {
        best = q;
        s.best_action = static_cast<int>(a);
      }
    }
    s.value = best;
  }
}

OracleTable solve_exact(const HybridProblem& problem, std::size_t cap) {
  return solve_exact(problem, problem.initial_state, problem.initial_point, cap);
}

OracleTable solve_exact(const HybridProblem& problem, const DiscreteState& n, const Point& x, std::size_t cap) {
  OracleTable table = enumerate_reachable(problem, n, x, cap);
  backward_induction(table);
  return table;
}

void write_oracle_csv(std::ostream& out, const HybridProblem& problem, const OracleTable& table) {
  const std::size_t width = problem.fluent_count();
  out << "fluents_hex";
  for (std::size_t d = 0; d < problem.space.dims(); ++d) out << ",x_" << (d + 1);
  out << ",value,action\n";
  out.precision(17);
  for (const OracleState& s : table.states()) {
    out << s.n.hex(width);
    for (double v : s.x) out << ',' << v;
    out << ',' << s.value << ',';
    if (s.best_action == kNoAction)
      out << "terminal";
    else
      out << problem.actions[static_cast<std::size_t>(s.best_action)].name;
    out << '\n';
  }
}

MonteCarloEstimate evaluate_greedy(const OracleTable& table, std::size_t trials, std::uint64_t seed) {
  const auto& states = table.states();
  const auto& transitions = table.transitions();
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    StreamRng rng(seed, trial);
    double ret = 0.0;
    std::size_t i = 0;
    while (states[i].best_action != kNoAction) {
      const auto a = static_cast<std::size_t>(states[i].best_action);
      const double u = rng.uniform();
      double acc = 0.0;
      const OracleTransition* chosen = nullptr;
      for (std::size_t t = states[i].begin; t < states[i].end; ++t) {
        if (transitions[t].action != a) continue;
        chosen = &transitions[t];
        acc += transitions[t].probability;
        if (u < acc) break;
      }
      ret += chosen->reward;
      i = chosen->target;
    }
    sum += ret;
    sum_sq += ret * ret;
  }
  MonteCarloEstimate e;
  e.trials = trials;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  e.mean = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - n * e.mean * e.mean) / (n - 1.0)) : 0.0;
  e.std_error = std::sqrt(var / n);
  return e;
}

}  // namespace hao
