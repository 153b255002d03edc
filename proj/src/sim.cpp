#include "hao/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "hao/rng.hpp"

namespace hao {

const char* to_string(Termination t) { return t == Termination::kTerminal ? "terminal" : "done-at-fringe"; }

Trajectory simulate_trajectory(const HybridProblem& problem, const Solution& solution, std::uint64_t seed,
                               std::uint64_t stream) {
  StreamRng rng(seed, stream);
  Trajectory traj;
  DiscreteState n = solution.start;
  Point x = solution.x0;
  for (;;) {
    if (is_terminal(problem, n, x)) {
      traj.termination = Termination::kTerminal;
      break;
    }
    const PolicyNode* node = solution.find(n);
    if (node == nullptr || node->closed(x) == 0.0) {
      traj.termination = Termination::kFringe;
      break;
    }
    const int tag = node->policy(x);
    if (tag == kNoAction) throw ContractError("closed state without a policy action");
    const auto action = static_cast<std::size_t>(tag);
    const auto executable = executable_actions(problem, n, x);
    if (!std::binary_search(executable.begin(), executable.end(), action))
      throw ContractError("policy action is not executable at the visited state");
    const Branch* branch = problem.actions[action].branch_at(x);
    if (branch == nullptr) throw ContractError("no branch covers the visited state");

    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t pick = branch->outcomes.size();
    for (std::size_t k = 0; k < branch->outcomes.size(); ++k) {
      if (branch->outcomes[k].probability <= 0.0) continue;
      pick = k;
      acc += branch->outcomes[k].probability;
      if (u < acc) break;
    }
    const Outcome& o = branch->outcomes.at(pick);
    TrajectoryStep step{n, x, action, pick, o.effect.apply(n), arrival_point(o, x), 0.0};
    step.reward = o.reward(step.next_x);
    traj.total_return += step.reward;
    n = step.next_state;
    x = step.next_x;
    traj.steps.push_back(std::move(step));
  }
  return traj;
}

PolicyEvaluation evaluate_policy(const HybridProblem& problem, const Solution& solution, std::size_t trials,
                                 std::uint64_t seed, std::size_t jobs) {
  if (trials == 0) throw DomainError("policy evaluation needs at least one trial");
  const std::size_t goals = problem.goals.size();
  std::vector<double> returns(trials);
  std::vector<char> fringe(trials);
  std::vector<std::vector<char>> achieved(goals, std::vector<char>(trials));
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < trials; i += stride) {
      const Trajectory t = simulate_trajectory(problem, solution, seed, i);
      returns[i] = t.total_return;
      fringe[i] = t.termination == Termination::kFringe;
      const DiscreteState& last = t.steps.empty() ? solution.start : t.steps.back().next_state;
      for (std::size_t g = 0; g < goals; ++g) achieved[g][i] = last.test(problem.goal_fluent(g));
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, trials);
  if (jobs == 1) {
    run(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(run, j, jobs);
  }

  PolicyEvaluation e;
  e.trials = trials;
  double sum = 0.0;
  for (double r : returns) sum += r;
  e.mean = sum / static_cast<double>(trials);
  double ss = 0.0;
  for (double r : returns) ss += (r - e.mean) * (r - e.mean);
  if (trials > 1) e.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  e.fringe_stops = static_cast<std::size_t>(std::count(fringe.begin(), fringe.end(), 1));
  for (std::size_t g = 0; g < goals; ++g)
    e.goal_rates.push_back(static_cast<double>(std::count(achieved[g].begin(), achieved[g].end(), 1)) /
                           static_cast<double>(trials));
  return e;
}

void write_trajectory_csv(std::ostream& out, const HybridProblem& problem, const Trajectory& trajectory) {
  const std::size_t width = problem.fluent_count();
  const std::size_t d = problem.space.dims();
  out << "step,fluents_hex";
  for (std::size_t i = 0; i < d; ++i) out << ",x_" << (i + 1);
  out << ",action,outcome,next_fluents_hex";
  for (std::size_t i = 0; i < d; ++i) out << ",next_x_" << (i + 1);
  out << ",reward\n";
  out.precision(17);
  for (std::size_t s = 0; s < trajectory.steps.size(); ++s) {
    const auto& st = trajectory.steps[s];
    out << s << ',' << st.state.hex(width);
    for (double v : st.x) out << ',' << v;
    out << ',' << problem.actions[st.action].name << ',' << st.outcome << ',' << st.next_state.hex(width);
    for (double v : st.next_x) out << ',' << v;
    out << ',' << st.reward << '\n';
  }
}

}  // namespace hao
