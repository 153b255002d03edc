#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hao/backup.hpp"
#include "hao/model.hpp"
#include "hao/pwc.hpp"

namespace hao {

/// Goal-sum heuristic: total reward of goals not achieved in n, skipping goals
/// whose pruning hint (lock set, required fluent clear) rules them out.
/// Constant over the resources.
double heuristic_value(const HybridProblem& problem, const DiscreteState& n);

/// Strongly connected components of a directed graph given as adjacency
/// lists. Components come out children first: a component precedes every
/// component that can reach it.
std::vector<std::vector<std::size_t>> scc_decompose(const std::vector<std::vector<std::size_t>>& adjacency);

class InvalidProblem : public std::runtime_error {
 public:
  InvalidProblem(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

struct SearchStats {
  std::size_t iterations = 0;
  std::size_t nodes_created = 0;
  std::size_t nodes_expanded = 0;
  std::size_t regions_expanded = 0;
  std::size_t backups = 0;
  std::size_t multi_node_components = 0;
  std::size_t largest_component = 0;
  std::size_t component_sweeps = 0;
  std::size_t value_pieces = 0;
  std::size_t policy_nodes = 0;
  std::size_t policy_branches = 0;
  std::size_t goals_pursued = 0;
  double wall_ms = 0.0;
};

struct ErrorBound {
  double g0 = 0.0;  // realized value of the greedy policy stopping at the fringe
  double h0 = 0.0;  // remaining heuristic mass
};

struct SearchNode {
  struct Edge {
    std::size_t action;
    std::size_t node;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  DiscreteState state;
  double heuristic = 0.0;
  PwcFunction nonterminal;
  PwcFunction value;
  TagFunction policy;
  PwcFunction open;
  PwcFunction closed;
  PwcFunction reachable;
  std::vector<Edge> children;
  std::vector<Edge> parents;
};

/// Unbounded expansion horizon.
inline constexpr std::size_t kExhaustive = 0;

struct SearchOptions {
  /// Fringe expansion depth per iteration; kExhaustive for no limit.
  std::size_t horizon = 7;
  /// Back up the bounding box of a node's closed regions in one call.
  bool multi_region = true;
  std::optional<std::size_t> max_iterations;
  std::optional<double> max_seconds;
  /// Compute g/h before each report (costs one policy evaluation).
  bool track_error_bound = false;
  /// Start from every resource level in X instead of the x0 cell, so the start
  /// node's value function is exact on the whole hypercube.
  bool whole_space = false;
};

class SearchGraph;

struct IterationReport {
  std::size_t iteration;  // 0 before any expansion
  double value_at_start;
  std::optional<ErrorBound> bound;
  const SearchGraph* graph;
};

/// Explicit AND/OR graph over discrete states, each node carrying piecewise
/// constant value, policy and Open/Closed/Reachable regions.
class SearchGraph {
 public:
  SearchGraph(const HybridProblem& problem, SearchOptions options);

  const HybridProblem& problem() const { return *problem_; }
  const SearchOptions& options() const { return options_; }
  const std::vector<SearchNode>& nodes() const { return nodes_; }
  const SearchNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t start() const { return 0; }
  std::optional<std::size_t> find(const DiscreteState& n) const;
  const PwcFunction& start_cell() const { return start_cell_; }

  /// True if some node has a region both reachable and open.
  bool has_fringe() const;

  /// Expands every reachable open region, then the regions it opens, `horizon`
  /// levels deep. Returns the expanded nodes, ascending.
  std::vector<std::size_t> expand_step(std::size_t horizon);

  struct UpdateSummary {
    std::size_t backups = 0;
    std::size_t components = 0;
    std::size_t largest_component = 0;
    double max_change = 0.0;
  };
  /// Backs up `touched` and its ancestors along marked edges, components in
  /// children-first order, iterating multi-node components to a fixpoint.
  UpdateSummary update_values(const std::vector<std::size_t>& touched);

  /// Recomputes Reachable on every node by forward propagation of the start
  /// cell through the marked actions.
  void recompute_reachable();

  /// g/h decomposition of the start value under the greedy policy.
  ErrorBound error_bound() const;

  double value_at_start() const;
  const SearchStats& stats() const { return stats_; }
  SearchStats& stats() { return stats_; }

 private:
  std::size_t get_or_create(const DiscreteState& n);
  const PwcFunction& value_of(const DiscreteState& n) const;
  void expand_region(std::size_t id, const PwcFunction& region, std::map<std::size_t, PwcFunction>& next);
  double backup_node(std::size_t id);
  void add_edge(std::size_t from, std::size_t action, std::size_t to);

  const HybridProblem* problem_;
  SearchOptions options_;
  std::vector<SearchNode> nodes_;
  std::unordered_map<DiscreteState, std::size_t> index_;
  // Initial value functions of states not in the graph yet.
  mutable std::unordered_map<DiscreteState, PwcFunction> phantom_;
  PwcFunction start_cell_;
  SearchStats stats_;
};

struct PolicyNode {
  DiscreteState state;
  double heuristic = 0.0;
  PwcFunction value;
  TagFunction policy;
  PwcFunction closed;
  PwcFunction reachable;
};

/// The solution subgraph: every node reachable under the returned policy.
struct Solution {
  DiscreteState start;
  Point x0;
  std::vector<PolicyNode> nodes;  // start node first, the rest in canonical order
  double value_at_start = 0.0;
  double lower_bound = 0.0;  // g0
  double error_bound = 0.0;  // h0
  bool converged = false;
  SearchStats stats;

  const PolicyNode* find(const DiscreteState& n) const;
};

/// Runs the search. Throws InvalidProblem when validation fails.
Solution solve(const HybridProblem& problem, const SearchOptions& options = {},
               const std::function<void(const IterationReport&)>& on_iteration = {});

/// Number of discrete states reachable from the start cell by any action
/// sequence, using the same region propagation as the search.
std::size_t count_reachable_discrete(const HybridProblem& problem);

}  // namespace hao
